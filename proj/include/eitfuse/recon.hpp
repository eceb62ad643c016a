#pragma once

#include <optional>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "eitfuse/jacobian.hpp"
#include "eitfuse/raster.hpp"

namespace eitfuse {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// 5-point Laplacian over the in-circle pixels, neighbours beyond the support
/// treated as zero. Columns follow grid.in_circle_indices().
SparseMatrix laplacian_operator(const PixelGrid& grid);

/// Cross-gradient t = dx(a) dy(b) - dy(a) dx(b). x runs along columns, y runs
/// up (toward row 0). Central differences inside the support, one-sided at its
/// edge, zero where neither neighbour is in the support. Zero outside support.
PixelImage cross_gradient(const PixelImage& a, const PixelImage& b, const BinaryImage& support);
PixelImage cross_gradient(const PixelImage& a, const PixelImage& b);

/// Matrix of x -> cross_gradient(x, m) restricted to the in-circle pixels.
SparseMatrix cross_gradient_operator(const PixelImage& m, const PixelGrid& grid);

/// 3x3 box-filtered mask (edge replication), the structural image used by CG.
PixelImage smooth_mask(const MaskImage& mask);

/// Scale of the default Tikhonov weight relative to tr(J'J) / tr(L'L).
inline constexpr double kDefaultLambdaScale = 1.0;

/// kDefaultLambdaScale * tr(J'J) / tr(L'L). The cross-gradient weight defaults to the same value.
double default_lambda(const SensitivityMatrix& J);

/// Linear regularized inverse x = argmin |Jx - dv|^2 + x' P x, for a fixed SPD
/// penalty P. Solved through the 104x104 system (I + J P^-1 J') so several
/// frames share one factorization.
class RegularizedInverse {
public:
    RegularizedInverse(const Eigen::MatrixXd& J, const SparseMatrix& penalty);
    Eigen::VectorXd solve(const Eigen::VectorXd& dv) const;
    const Eigen::MatrixXd& reconstruction_matrix() const { return recon_; }

private:
    Eigen::MatrixXd recon_;  // n x m
};

/// Tikhonov with Gauss-Laplace prior, argmin |Jx - dv|^2 + lambda |Lx|^2.
class TikhonovGL {
public:
    TikhonovGL(const SensitivityMatrix& J, double lambda);
    PixelImage reconstruct(const MeasurementFrame& dv) const;
    double lambda() const { return lambda_; }

private:
    const SensitivityMatrix* J_;
    double lambda_;
    RegularizedInverse inverse_;
};

PixelImage treg_gl(const SensitivityMatrix& J, const MeasurementFrame& dv, double lambda);

/// Cross-gradient regularized inversion against the smoothed mask.
PixelImage cg_recon(const SensitivityMatrix& J, const MeasurementFrame& dv, const MaskImage& mask,
                    double lambda, double gamma);

/// |Jx - dv|^2 + lambda |Lx|^2 (+ gamma |G x|^2 when G is given), x over the support.
double regularized_objective(const Eigen::MatrixXd& J, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& dv, const SparseMatrix& L, double lambda,
                             const SparseMatrix* G = nullptr, double gamma = 0.0);

}  // namespace eitfuse
