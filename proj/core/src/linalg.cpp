#include "latentkit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "latentkit/error.hpp"

namespace latentkit::linalg {

Vector column_mean(const Matrix& x) {
  return x.colwise().mean().transpose();
}

Matrix centered(const Matrix& x, const Vector& mu) {
  return x.rowwise() - mu.transpose();
}

Matrix sample_covariance(const Matrix& x) {
  if (x.rows() < 2) {
    fail(ErrorCode::DegenerateInput, "covariance needs at least two rows");
  }
  const Matrix xc = centered(x, column_mean(x));
  Matrix cov = Matrix::Zero(x.cols(), x.cols());
  cov.selfadjointView<Eigen::Lower>().rankUpdate(xc.transpose());
  cov = cov.selfadjointView<Eigen::Lower>();
  return cov / static_cast<double>(x.rows() - 1);
}

Matrix inverse_sqrt_psd(const Matrix& s, double floor) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
  if (eig.info() != Eigen::Success) {
    fail(ErrorCode::NonFiniteInput, "symmetric eigendecomposition failed");
  }
  const Vector scale = eig.eigenvalues().unaryExpr(
      [floor](double v) { return 1.0 / std::sqrt(std::max(v, floor)); });
  const Matrix& q = eig.eigenvectors();
  return q * scale.asDiagonal() * q.transpose();
}

Matrix pseudo_inverse(const Matrix& m) {
  if (m.size() == 0) return Matrix(m.cols(), m.rows());
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const double cutoff = static_cast<double>(std::max(m.rows(), m.cols())) *
                        sv(0) * kPinvRelTol;
  Vector inv = Vector::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

void normalize_column_signs(Matrix& v) {
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < v.rows(); ++i) {
      if (std::abs(v(i, j)) > std::abs(v(best, j))) best = i;
    }
    if (v.rows() > 0 && v(best, j) < 0) v.col(j) *= -1.0;
  }
}

void require_finite(const Matrix& x, std::string_view what) {
  if (!x.allFinite()) {
    fail(ErrorCode::NonFiniteInput, std::string(what) + " contains NaN or Inf");
  }
}

}  // namespace latentkit::linalg
