#pragma once

#include <nlohmann/json_fwd.hpp>

#include "latentkit/linalg.hpp"

namespace latentkit {

inline constexpr double kDefaultEpsilon = 1e-6;

/// Cholesky whitening transform: C = cov(X) + eps*I = L L^T.
struct WhitenModel {
  Vector mu;
  Matrix L;  // lower triangular, positive diagonal
  double epsilon = kDefaultEpsilon;

  Eigen::Index dim() const { return mu.size(); }

  /// {"mu": [...], "L": [row-major], "dim": d, "epsilon": eps}
  nlohmann::json to_json() const;
  static WhitenModel from_json(const nlohmann::json& j);
};

/// Throws DegenerateInput (n < 2), InvalidArgument (eps <= 0),
/// NonFiniteInput, CholeskyFailure.
WhitenModel fit_whitener(const Matrix& x, double epsilon = kDefaultEpsilon);

/// (X - 1 mu^T) L^{-T}, by triangular solve. Throws DimensionMismatch.
Matrix prewhiten(const WhitenModel& m, const Matrix& x);

/// Z L^T + 1 mu^T. Throws DimensionMismatch.
Matrix dewhiten(const WhitenModel& m, const Matrix& z);

}  // namespace latentkit
