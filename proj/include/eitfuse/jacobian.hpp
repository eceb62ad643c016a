#pragma once

#include <vector>

#include <Eigen/Dense>

#include "eitfuse/forward.hpp"
#include "eitfuse/frame.hpp"
#include "eitfuse/raster.hpp"

namespace eitfuse {

/// Assigns every mesh element to the in-circle pixel containing its centroid.
/// Centroids that land in an out-of-circle pixel go to the nearest in-circle
/// pixel. Returns, per element, the column index into grid.in_circle_indices().
std::vector<int> element_pixel_columns(const Mesh& mesh, const PixelGrid& grid);

/// Linearized map from the pixel image (relative conductivity decrease) to the
/// normalized-difference frame, about a reference field.
struct SensitivityMatrix {
    Eigen::MatrixXd matrix;          // kFrameSize x in-circle pixel count
    PixelGrid grid;
    std::vector<int> pixels;         // column -> row-major pixel index
    MeasurementFrame reference;      // raw frame of the reference field

    Eigen::Index rows() const { return matrix.rows(); }
    Eigen::Index cols() const { return matrix.cols(); }

    /// Embed a column vector into a full square image (zeros outside support).
    PixelImage to_image(const Eigen::VectorXd& x) const;
    Eigen::VectorXd from_image(const PixelImage& img) const;
};

/// Adjoint-field sensitivity. Element entries are
/// sigma_ref * area * grad(u^l) . grad(u^g) / (J * V0), summed per pixel.
SensitivityMatrix jacobian(const Mesh& mesh, const ConductivityField& reference_field,
                           const SensorGeometry& geometry, double current,
                           const PixelGrid& grid);

}  // namespace eitfuse
