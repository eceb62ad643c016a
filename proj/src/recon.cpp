#include "eitfuse/recon.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SparseCholesky>

#include "eitfuse/error.hpp"

namespace eitfuse {

namespace {

// Column index of each pixel in the support, -1 outside.
std::vector<int> support_columns(const PixelGrid& grid) {
    std::vector<int> col(static_cast<std::size_t>(grid.side) * grid.side, -1);
    const auto pixels = grid.in_circle_indices();
    for (std::size_t k = 0; k < pixels.size(); ++k) col[pixels[k]] = static_cast<int>(k);
    return col;
}

// Difference stencil along one axis at (r, c): central when both neighbours
// are in the support, one-sided when only one is, empty otherwise.
// `step` is the +1 direction in (dr, dc); returns (weight, linear index) taps.
struct Tap {
    int index;
    double weight;
};

std::vector<Tap> derivative_taps(const BinaryImage& support, int r, int c, int dr, int dc) {
    const int rows = support.rows, cols = support.cols;
    auto inside = [&](int rr, int cc) { return support.contains(rr, cc) && support.at(rr, cc); };
    const bool fwd = inside(r + dr, c + dc);
    const bool bwd = inside(r - dr, c - dc);
    (void)rows;
    if (fwd && bwd) return {{(r + dr) * cols + (c + dc), 0.5}, {(r - dr) * cols + (c - dc), -0.5}};
    if (fwd) return {{(r + dr) * cols + (c + dc), 1.0}, {r * cols + c, -1.0}};
    if (bwd) return {{r * cols + c, 1.0}, {(r - dr) * cols + (c - dc), -1.0}};
    return {};
}

double apply(const std::vector<Tap>& taps, const std::vector<double>& v) {
    double s = 0.0;
    for (const auto& t : taps) s += t.weight * v[t.index];
    return s;
}

BinaryImage grid_support(const PixelGrid& grid) {
    BinaryImage s(grid.side, grid.side, 0);
    for (int r = 0; r < grid.side; ++r)
        for (int c = 0; c < grid.side; ++c) s.at(r, c) = grid.in_circle(r, c) ? 1 : 0;
    return s;
}

}  // namespace

SparseMatrix laplacian_operator(const PixelGrid& grid) {
    const auto col = support_columns(grid);
    const auto pixels = grid.in_circle_indices();
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(pixels.size() * 5);
    constexpr int dr[4] = {-1, 1, 0, 0};
    constexpr int dc[4] = {0, 0, -1, 1};
    for (std::size_t k = 0; k < pixels.size(); ++k) {
        const int r = pixels[k] / grid.side, c = pixels[k] % grid.side;
        t.emplace_back(static_cast<int>(k), static_cast<int>(k), 4.0);
        for (int n = 0; n < 4; ++n) {
            const int rr = r + dr[n], cc = c + dc[n];
            if (rr < 0 || rr >= grid.side || cc < 0 || cc >= grid.side) continue;
            const int j = col[rr * grid.side + cc];
            if (j >= 0) t.emplace_back(static_cast<int>(k), j, -1.0);
        }
    }
    const auto n = static_cast<Eigen::Index>(pixels.size());
    SparseMatrix L(n, n);
    L.setFromTriplets(t.begin(), t.end());
    return L;
}

PixelImage cross_gradient(const PixelImage& a, const PixelImage& b, const BinaryImage& support) {
    if (a.rows != b.rows || a.cols != b.cols || support.rows != a.rows || support.cols != a.cols) {
        throw InputError("cross_gradient: image sizes differ");
    }
    PixelImage t(a.rows, a.cols, 0.0);
    for (int r = 0; r < a.rows; ++r) {
        for (int c = 0; c < a.cols; ++c) {
            if (!support.at(r, c)) continue;
            const auto dx = derivative_taps(support, r, c, 0, 1);
            const auto dy = derivative_taps(support, r, c, -1, 0);  // y points up
            t.at(r, c) = apply(dx, a.data) * apply(dy, b.data) - apply(dy, a.data) * apply(dx, b.data);
        }
    }
    return t;
}

PixelImage cross_gradient(const PixelImage& a, const PixelImage& b) {
    if (a.rows != a.cols) throw InputError("cross_gradient: default support needs a square image");
    return cross_gradient(a, b, grid_support(PixelGrid{a.rows, 1.0}));
}

SparseMatrix cross_gradient_operator(const PixelImage& m, const PixelGrid& grid) {
    if (m.rows != grid.side || m.cols != grid.side) throw InputError("structural image size mismatch");
    const auto col = support_columns(grid);
    const auto pixels = grid.in_circle_indices();
    const BinaryImage support = grid_support(grid);
    std::vector<Eigen::Triplet<double>> t;
    for (std::size_t k = 0; k < pixels.size(); ++k) {
        const int r = pixels[k] / grid.side, c = pixels[k] % grid.side;
        const auto dx = derivative_taps(support, r, c, 0, 1);
        const auto dy = derivative_taps(support, r, c, -1, 0);
        const double mx = apply(dx, m.data);
        const double my = apply(dy, m.data);
        // t = dx(x) * my - dy(x) * mx
        for (const auto& tap : dx) t.emplace_back(static_cast<int>(k), col[tap.index], tap.weight * my);
        for (const auto& tap : dy) t.emplace_back(static_cast<int>(k), col[tap.index], -tap.weight * mx);
    }
    const auto n = static_cast<Eigen::Index>(pixels.size());
    SparseMatrix G(n, n);
    G.setFromTriplets(t.begin(), t.end());
    G.prune(0.0);
    return G;
}

PixelImage smooth_mask(const MaskImage& mask) {
    PixelImage out(mask.rows, mask.cols, 0.0);
    for (int r = 0; r < mask.rows; ++r) {
        for (int c = 0; c < mask.cols; ++c) {
            double s = 0.0;
            for (int a = -1; a <= 1; ++a) {
                for (int b = -1; b <= 1; ++b) {
                    const int rr = std::clamp(r + a, 0, mask.rows - 1);
                    const int cc = std::clamp(c + b, 0, mask.cols - 1);
                    s += mask.at(rr, cc);
                }
            }
            out.at(r, c) = s / 9.0;
        }
    }
    return out;
}

double default_lambda(const SensitivityMatrix& J) {
    const SparseMatrix L = laplacian_operator(J.grid);
    return kDefaultLambdaScale * J.matrix.squaredNorm() / L.squaredNorm();
}

RegularizedInverse::RegularizedInverse(const Eigen::MatrixXd& J, const SparseMatrix& penalty) {
    if (penalty.rows() != J.cols() || penalty.cols() != J.cols()) {
        throw InputError("penalty size does not match the sensitivity matrix");
    }
    Eigen::SimplicialLLT<SparseMatrix> chol(penalty);
    if (chol.info() != Eigen::Success) {
        throw SolverError("regularized normal matrix is singular; use lambda > 0");
    }
    // x = P^-1 J' (I + J P^-1 J')^-1 dv, the push-through form of (J'J + P)^-1 J' dv.
    const Eigen::MatrixXd W = chol.solve(Eigen::MatrixXd(J.transpose()));
    Eigen::MatrixXd S = J * W;
    S.diagonal().array() += 1.0;
    Eigen::LLT<Eigen::MatrixXd> small(S);
    if (small.info() != Eigen::Success) throw SolverError("measurement-space system is not SPD");
    recon_ = small.solve(W.transpose()).transpose();
}

Eigen::VectorXd RegularizedInverse::solve(const Eigen::VectorXd& dv) const {
    if (dv.size() != recon_.cols()) throw InputError("frame length mismatch");
    return recon_ * dv;
}

namespace {

void check_inputs(const SensitivityMatrix& J, double lambda) {
    if (J.rows() != kFrameSize) throw InputError("sensitivity matrix must have 104 rows");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw SolverError("normal matrix is singular without regularization; use lambda > 0");
    }
}

Eigen::VectorXd frame_vector(const MeasurementFrame& dv) {
    return Eigen::Map<const Eigen::VectorXd>(dv.values.data(), kFrameSize);
}

}  // namespace

TikhonovGL::TikhonovGL(const SensitivityMatrix& J, double lambda)
    : J_(&J), lambda_(lambda), inverse_([&] {
          check_inputs(J, lambda);
          const SparseMatrix L = laplacian_operator(J.grid);
          const SparseMatrix P = lambda * SparseMatrix(L.transpose() * L);
          return RegularizedInverse(J.matrix, P);
      }()) {}

PixelImage TikhonovGL::reconstruct(const MeasurementFrame& dv) const {
    return J_->to_image(inverse_.solve(frame_vector(dv)));
}

PixelImage treg_gl(const SensitivityMatrix& J, const MeasurementFrame& dv, double lambda) {
    return TikhonovGL(J, lambda).reconstruct(dv);
}

PixelImage cg_recon(const SensitivityMatrix& J, const MeasurementFrame& dv, const MaskImage& mask,
                    double lambda, double gamma) {
    check_inputs(J, lambda);
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InputError("gamma must be non-negative");
    const SparseMatrix L = laplacian_operator(J.grid);
    SparseMatrix P = lambda * SparseMatrix(L.transpose() * L);
    if (gamma > 0.0) {
        const SparseMatrix G = cross_gradient_operator(smooth_mask(mask), J.grid);
        P += gamma * SparseMatrix(G.transpose() * G);
    }
    return J.to_image(RegularizedInverse(J.matrix, P).solve(frame_vector(dv)));
}

double regularized_objective(const Eigen::MatrixXd& J, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& dv, const SparseMatrix& L, double lambda,
                             const SparseMatrix* G, double gamma) {
    double f = (J * x - dv).squaredNorm() + lambda * (L * x).squaredNorm();
    if (G) f += gamma * ((*G) * x).squaredNorm();
    return f;
}

}  // namespace eitfuse
