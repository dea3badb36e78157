#pragma once

#include <Eigen/Dense>

#include <string_view>

namespace latentkit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

namespace linalg {

/// Relative cutoff used by every pseudo-inverse in the library: singular
/// values below max(rows, cols) * sigma_max * kPinvRelTol count as zero.
inline constexpr double kPinvRelTol = 1e-12;

Vector column_mean(const Matrix& x);

/// x - 1 mu^T
Matrix centered(const Matrix& x, const Vector& mu);

/// Unbiased sample covariance, (n-1) divisor.
Matrix sample_covariance(const Matrix& x);

/// Symmetric S^{-1/2} through the eigendecomposition, with eigenvalues
/// floored at `floor` before the inverse square root.
Matrix inverse_sqrt_psd(const Matrix& s, double floor);

Matrix pseudo_inverse(const Matrix& m);

/// Flip each column so its largest-magnitude entry is positive (first such
/// entry on ties).
void normalize_column_signs(Matrix& v);

void require_finite(const Matrix& x, std::string_view what);

}  // namespace linalg
}  // namespace latentkit
