#include "eitfuse/jacobian.hpp"

#include <cmath>
#include <limits>

#include "eitfuse/error.hpp"

namespace eitfuse {

std::vector<int> element_pixel_columns(const Mesh& mesh, const PixelGrid& grid) {
    const auto pixels = grid.in_circle_indices();
    std::vector<int> column_of_pixel(static_cast<std::size_t>(grid.side) * grid.side, -1);
    for (std::size_t k = 0; k < pixels.size(); ++k) column_of_pixel[pixels[k]] = static_cast<int>(k);

    std::vector<int> out(mesh.element_count());
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const Point2 c = mesh.centroid(e);
        int r = 0, col = 0;
        grid.locate(c.x, c.y, r, col);
        int k = column_of_pixel[r * grid.side + col];
        if (k < 0) {
            double best = std::numeric_limits<double>::infinity();
            for (int dr = -2; dr <= 2; ++dr) {
                for (int dc = -2; dc <= 2; ++dc) {
                    const int rr = r + dr, cc = col + dc;
                    if (rr < 0 || rr >= grid.side || cc < 0 || cc >= grid.side) continue;
                    const int kk = column_of_pixel[rr * grid.side + cc];
                    if (kk < 0) continue;
                    const double d = std::hypot(grid.center_x(cc) - c.x, grid.center_y(rr) - c.y);
                    if (d < best) {
                        best = d;
                        k = kk;
                    }
                }
            }
            if (k < 0) throw InputError("element centroid far outside the pixel grid");
        }
        out[e] = k;
    }
    return out;
}

PixelImage SensitivityMatrix::to_image(const Eigen::VectorXd& x) const {
    if (x.size() != static_cast<Eigen::Index>(pixels.size())) {
        throw InputError("vector length does not match the in-circle pixel count");
    }
    PixelImage img(grid.side, grid.side, 0.0);
    for (std::size_t k = 0; k < pixels.size(); ++k) img.data[pixels[k]] = x[static_cast<Eigen::Index>(k)];
    return img;
}

Eigen::VectorXd SensitivityMatrix::from_image(const PixelImage& img) const {
    if (img.rows != grid.side || img.cols != grid.side) throw InputError("image size mismatch");
    Eigen::VectorXd x(static_cast<Eigen::Index>(pixels.size()));
    for (std::size_t k = 0; k < pixels.size(); ++k) x[static_cast<Eigen::Index>(k)] = img.data[pixels[k]];
    return x;
}

SensitivityMatrix jacobian(const Mesh& mesh, const ConductivityField& reference_field,
                           const SensorGeometry& geometry, double current,
                           const PixelGrid& grid) {
    ForwardSolver solver(mesh, geometry, reference_field);
    const FullVoltageSet full = solver.solve_all(current);

    SensitivityMatrix J;
    J.grid = grid;
    J.pixels = grid.in_circle_indices();
    J.reference = extract_frame(full);
    const auto columns = element_pixel_columns(mesh, grid);

    const std::size_t ne = mesh.element_count();
    std::vector<std::array<double, 2>> grads(ne * kElectrodeCount);
    for (int l = 0; l < kElectrodeCount; ++l) {
        for (std::size_t e = 0; e < ne; ++e) {
            grads[l * ne + e] = element_gradient(mesh, e, full.injections[l].node_potentials);
        }
    }

    J.matrix = Eigen::MatrixXd::Zero(kFrameSize, static_cast<Eigen::Index>(J.pixels.size()));
    const auto& order = canonical_order();
    for (int m = 0; m < kFrameSize; ++m) {
        const int l = order[m].injection - 1;
        const int g = order[m].pair - 1;
        const double v0 = J.reference.values[m];
        if (v0 == 0.0) throw SolverError("reference measurement " + std::to_string(m) + " is zero");
        const double scale = 1.0 / (current * v0);
        for (std::size_t e = 0; e < ne; ++e) {
            const auto& a = grads[l * ne + e];
            const auto& b = grads[g * ne + e];
            const double area = mesh.element_areas[e] * 1e-6;
            J.matrix(m, columns[e]) +=
                scale * reference_field.values[e] * area * (a[0] * b[0] + a[1] * b[1]);
        }
    }
    return J;
}

}  // namespace eitfuse
