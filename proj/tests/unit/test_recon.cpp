#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "eitfuse/dataset.hpp"
#include "eitfuse/error.hpp"
#include "eitfuse/jacobian.hpp"
#include "eitfuse/phantoms.hpp"
#include "eitfuse/recon.hpp"

using namespace eitfuse;

namespace {

const SensorGeometry kGeom{};

struct Small {
    PixelGrid grid{20, 7.0};
    Mesh mesh = build_mesh(kGeom, 0.35);
    SensitivityMatrix J = jacobian(mesh, uniform(), kGeom, kGeom.current, grid);
    ConductivityField uniform() const { return ConductivityField::uniform(mesh.element_count(), kBackgroundConductivity); }
    MeasurementFrame dv(const PhantomScene& s) const {
        return normalized_difference(extract_frame(full_forward(mesh, rasterize_field(s, mesh), kGeom, kGeom.current)),
                                     extract_frame(full_forward(mesh, uniform(), kGeom, kGeom.current)));
    }
    MaskImage mask(const PhantomScene& s) const { return mask_image(s, grid); }
};

const Small& small() {
    static const Small s;
    return s;
}

double diff_norm(const PixelImage& a, const PixelImage& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a.data[i] - b.data[i]) * (a.data[i] - b.data[i]);
    return std::sqrt(s);
}

double norm(const PixelImage& a) {
    double s = 0.0;
    for (double v : a.data) s += v * v;
    return std::sqrt(s);
}

PixelImage ramp(int side, bool along_x) {
    PixelImage img(side, side);
    for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c) img.at(r, c) = along_x ? c : side - 1 - r;
    return img;
}

}  // namespace

TEST_CASE("cross-gradient identities") {
    PixelImage a(8, 8);
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) a.at(r, c) = std::sin(0.7 * r) + 0.3 * c * c;
    PixelImage b = a;
    for (double& v : b.data) v = 2.0 * v + 3.0;
    const BinaryImage all(8, 8, 1);
    for (double v : cross_gradient(a, a, all).data) CHECK(v == 0.0);
    for (double v : cross_gradient(a, b, all).data) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("cross-gradient of column and row ramps on a 3x3 patch") {
    // y points toward row 0: b = row index decreases along y, b = 2 - row increases.
    const BinaryImage all(3, 3, 1);
    PixelImage rows(3, 3);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) rows.at(r, c) = r;
    CHECK(cross_gradient(ramp(3, true), rows, all).at(1, 1) == doctest::Approx(-1.0));
    CHECK(cross_gradient(ramp(3, true), ramp(3, false), all).at(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("cross-gradient operator reproduces the image function") {
    const PixelGrid grid{16, 7.0};
    PixelImage m(16, 16), x(16, 16);
    for (int r = 0; r < 16; ++r)
        for (int c = 0; c < 16; ++c) {
            m.at(r, c) = std::exp(-0.05 * ((r - 7) * (r - 7) + (c - 9) * (c - 9)));
            x.at(r, c) = grid.in_circle(r, c) ? std::cos(0.4 * r) * std::sin(0.3 * c) : 0.0;
        }
    const SparseMatrix G = cross_gradient_operator(m, grid);
    const auto idx = grid.in_circle_indices();
    Eigen::VectorXd xv(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) xv[k] = x.data[idx[k]];
    const Eigen::VectorXd tv = G * xv;
    const PixelImage t = cross_gradient(x, m);
    for (std::size_t k = 0; k < idx.size(); ++k) CHECK(std::abs(tv[k] - t.data[idx[k]]) < 1e-12);
}

TEST_CASE("laplacian is symmetric with the 5-point stencil") {
    const PixelGrid grid{12, 7.0};
    const Eigen::MatrixXd L(laplacian_operator(grid));
    CHECK((L - L.transpose()).norm() == 0.0);
    for (Eigen::Index i = 0; i < L.rows(); ++i) {
        CHECK(L(i, i) == 4.0);
        CHECK(L.row(i).cwiseAbs().sum() <= 8.0);
    }
}

TEST_CASE("treg_gl equals the dense normal-equation solve") {
    const Small& s = small();
    const MeasurementFrame dv = s.dv(sample_phantom(3, 2, kGeom));
    const double lambda = default_lambda(s.J);
    const Eigen::MatrixXd L(laplacian_operator(s.grid));
    const Eigen::Map<const Eigen::VectorXd> d(dv.values.data(), kFrameSize);
    const Eigen::VectorXd oracle =
        (s.J.matrix.transpose() * s.J.matrix + lambda * L.transpose() * L).ldlt().solve(s.J.matrix.transpose() * d);
    const Eigen::VectorXd x = s.J.from_image(treg_gl(s.J, dv, lambda));
    CHECK((x - oracle).norm() / oracle.norm() < 1e-8);
}

TEST_CASE("cg_recon equals the dense augmented solve") {
    const Small& s = small();
    const PhantomScene scene = sample_phantom(4, 1, kGeom);
    const MeasurementFrame dv = s.dv(scene);
    const double lambda = default_lambda(s.J), gamma = 3.0 * lambda;
    const Eigen::MatrixXd L(laplacian_operator(s.grid));
    const Eigen::MatrixXd G(cross_gradient_operator(smooth_mask(s.mask(scene)), s.grid));
    const Eigen::Map<const Eigen::VectorXd> d(dv.values.data(), kFrameSize);
    const Eigen::MatrixXd A =
        s.J.matrix.transpose() * s.J.matrix + lambda * L.transpose() * L + gamma * G.transpose() * G;
    const Eigen::VectorXd oracle = A.ldlt().solve(s.J.matrix.transpose() * d);
    const Eigen::VectorXd x = s.J.from_image(cg_recon(s.J, dv, s.mask(scene), lambda, gamma));
    CHECK((x - oracle).norm() / oracle.norm() < 1e-8);
}

TEST_CASE("cg_recon reduces to treg_gl") {
    const Small& s = small();
    const PhantomScene scene = sample_phantom(5, 2, kGeom);
    const MeasurementFrame dv = s.dv(scene);
    const double lambda = default_lambda(s.J);
    const PixelImage tr = treg_gl(s.J, dv, lambda);
    CHECK(diff_norm(cg_recon(s.J, dv, s.mask(scene), lambda, 0.0), tr) <= 1e-10 * norm(tr));
    const MaskImage full(20, 20, 1);
    CHECK(diff_norm(cg_recon(s.J, dv, full, lambda, lambda), tr) <= 1e-10 * norm(tr));
}

TEST_CASE("solutions minimize their objective") {
    const Small& s = small();
    const PhantomScene scene = sample_phantom(6, 1, kGeom);
    const MeasurementFrame dv = s.dv(scene);
    const double lambda = default_lambda(s.J), gamma = lambda;
    const SparseMatrix L = laplacian_operator(s.grid);
    const SparseMatrix G = cross_gradient_operator(smooth_mask(s.mask(scene)), s.grid);
    const Eigen::Map<const Eigen::VectorXd> d(dv.values.data(), kFrameSize);
    const Eigen::VectorXd x = s.J.from_image(cg_recon(s.J, dv, s.mask(scene), lambda, gamma));
    const double best = regularized_objective(s.J.matrix, x, d, L, lambda, &G, gamma);
    Eigen::VectorXd dir = Eigen::VectorXd::LinSpaced(x.size(), -1.0, 1.0);
    dir *= 1e-3 * x.norm() / dir.norm();
    CHECK(regularized_objective(s.J.matrix, x + dir, d, L, lambda, &G, gamma) > best);
    CHECK(regularized_objective(s.J.matrix, x - dir, d, L, lambda, &G, gamma) > best);
}

TEST_CASE("cross-gradient norm decreases with gamma") {
    const Small& s = small();
    const PhantomScene scene = sample_phantom(7, 1, kGeom);
    const MeasurementFrame dv = s.dv(scene);
    const MaskImage mask = s.mask(scene);
    const PixelImage m = smooth_mask(mask);
    const double lambda = default_lambda(s.J);
    double previous = std::numeric_limits<double>::infinity();
    for (double scale : {0.0, 0.1, 1.0, 10.0}) {
        const double t = norm(cross_gradient(cg_recon(s.J, dv, mask, lambda, scale * lambda), m));
        CHECK(t <= previous * (1.0 + 1e-12));
        if (scale > 0.0) CHECK(t < previous);
        previous = t;
    }
}

TEST_CASE("heavy regularization shrinks the solution like 1/lambda") {
    // Smooth Laplacian modes have small eigenvalues, so the decay is 1/lambda rather than abrupt.
    const Small& s = small();
    const MeasurementFrame dv = s.dv(sample_phantom(8, 1, kGeom));
    const double scale = s.J.matrix.squaredNorm() / Eigen::MatrixXd(laplacian_operator(s.grid)).squaredNorm();
    const Eigen::Map<const Eigen::VectorXd> d(dv.values.data(), kFrameSize);
    const Eigen::VectorXd least_norm = s.J.matrix.completeOrthogonalDecomposition().solve(d);
    const double n6 = s.J.from_image(treg_gl(s.J, dv, 1e6 * scale)).norm();
    const double n7 = s.J.from_image(treg_gl(s.J, dv, 1e7 * scale)).norm();
    const double n8 = s.J.from_image(treg_gl(s.J, dv, 1e8 * scale)).norm();
    CHECK(n6 < 1e-2 * least_norm.norm());
    CHECK(n7 < n6);
    CHECK(n8 * 10.0 == doctest::Approx(n7).epsilon(1e-2));
}

TEST_CASE("smoothed mask is a box average with edge replication") {
    MaskImage mask(6, 6, 0);
    mask.at(2, 3) = 1;
    const PixelImage m = smooth_mask(mask);
    CHECK(m.at(2, 3) == doctest::Approx(1.0 / 9.0));
    CHECK(m.at(1, 2) == doctest::Approx(1.0 / 9.0));
    CHECK(m.at(0, 0) == 0.0);
    for (double v : smooth_mask(MaskImage(6, 6, 1)).data) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("recon rejects invalid weights") {
    const Small& s = small();
    const MeasurementFrame dv{};
    CHECK_THROWS_AS(treg_gl(s.J, dv, -1.0), SolverError);
    CHECK_THROWS_AS(treg_gl(s.J, dv, 0.0), SolverError);
    CHECK_THROWS_AS(cg_recon(s.J, dv, MaskImage(20, 20, 0), 1.0, -1.0), InputError);
    CHECK_THROWS_AS(cg_recon(s.J, dv, MaskImage(8, 8, 0), 1.0, 1.0), InputError);
}
