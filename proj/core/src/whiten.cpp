#include "latentkit/whiten.hpp"

#include <string>

#include <nlohmann/json.hpp>

#include "json_matrix.hpp"
#include "latentkit/error.hpp"

namespace latentkit {

WhitenModel fit_whitener(const Matrix& x, double epsilon) {
  if (x.rows() < 2) fail(ErrorCode::DegenerateInput, "whitening needs at least two rows");
  if (!(epsilon > 0.0)) fail(ErrorCode::InvalidArgument, "epsilon must be positive");
  linalg::require_finite(x, "whitening input");
  WhitenModel m;
  m.epsilon = epsilon;
  m.mu = linalg::column_mean(x);
  Matrix c = linalg::sample_covariance(x);
  c.diagonal().array() += epsilon;
  Eigen::LLT<Matrix> llt(c);
  if (llt.info() != Eigen::Success) {
    fail(ErrorCode::CholeskyFailure, "regularized covariance is not positive definite");
  }
  m.L = llt.matrixL();
  return m;
}

Matrix prewhiten(const WhitenModel& m, const Matrix& x) {
  if (x.cols() != m.dim()) {
    fail(ErrorCode::DimensionMismatch, "prewhiten: input has " + std::to_string(x.cols()) +
                                           " columns, model expects " + std::to_string(m.dim()));
  }
  // Solve L Y^T = Xc^T, so Y = Xc L^{-T}.
  const Matrix xct = linalg::centered(x, m.mu).transpose();
  return m.L.triangularView<Eigen::Lower>().solve(xct).transpose();
}

Matrix dewhiten(const WhitenModel& m, const Matrix& z) {
  if (z.cols() != m.dim()) {
    fail(ErrorCode::DimensionMismatch, "dewhiten: input has " + std::to_string(z.cols()) +
                                           " columns, model expects " + std::to_string(m.dim()));
  }
  Matrix out = z * m.L.triangularView<Eigen::Lower>().transpose();
  out.rowwise() += m.mu.transpose();
  return out;
}

nlohmann::json WhitenModel::to_json() const {
  return {{"dim", dim()},
          {"epsilon", epsilon},
          {"mu", detail::vector_to_json(mu)},
          {"L", detail::matrix_to_json(L)}};
}

WhitenModel WhitenModel::from_json(const nlohmann::json& j) {
  try {
    WhitenModel m;
    m.epsilon = j.at("epsilon").get<double>();
    m.mu = detail::vector_from_json(j.at("mu"));
    m.L = detail::matrix_from_json(j.at("L"));
    if (m.L.rows() != m.mu.size() || m.L.cols() != m.mu.size()) {
      fail(ErrorCode::MalformedFile, "whitener: L shape does not match mu");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::MalformedFile, std::string("whitener JSON: ") + e.what());
  }
}

}  // namespace latentkit
