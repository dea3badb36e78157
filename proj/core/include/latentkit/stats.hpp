#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "latentkit/linalg.hpp"
#include "latentkit/pairing.hpp"

namespace latentkit {

struct DesignMatrix {
  Matrix X;
  Vector y;
  std::vector<std::string> columns;

  std::optional<Eigen::Index> column(const std::string& name) const;
};

struct Factor {
  std::string name;
  std::vector<std::string> values;  // one per row
};

/// Columns: intercept, treated, then one dummy per non-reference level of
/// each factor ("name[level]"); the alphabetically first level is dropped.
DesignMatrix treatment_design(const Vector& y, const std::vector<int>& treated,
                              const std::vector<Factor>& factors);

struct OlsFit {
  Vector beta;
  Matrix cov_hc3;
  Matrix cov_classical;
  Vector residuals;
  Vector leverage;
  std::vector<std::string> columns;
  Eigen::Index n = 0;
  Eigen::Index p = 0;

  Vector se_hc3() const { return cov_hc3.diagonal().cwiseSqrt(); }
  Vector se_classical() const { return cov_classical.diagonal().cwiseSqrt(); }
};

/// QR least squares with HC3 sandwich covariance. Throws RankDeficient
/// (including n <= p) and LeverageOne (names the row).
OlsFit ols_hc3(const DesignMatrix& dm);

/// Sample standard deviation, (n-1) divisor. Throws ZeroControlVariance when
/// fewer than two values or zero spread.
double control_sd(std::span<const double> control_values);
/// beta / control_sd(control_values).
double standardize_effect(double beta, std::span<const double> control_values);

/// Two-sided normal p-value for beta / se.
double normal_two_sided_p(double z);
inline constexpr double kZ975 = 1.959963984540054;

// ---------------------------------------------------------------- treatment regressions

struct MetricObservation {
  std::string model_name;
  std::string dataset;
  std::string metric;
  double value = 0.0;
};

/// One pooled regression: every pair of the condition contributes a control
/// row and a treatment row per dataset where both models have the metric.
/// Fixed effects: family and dataset.
struct RegressionTask {
  std::string condition;
  std::string metric;
  DesignMatrix design;
  std::vector<double> control_values;
  std::size_t n_pairs = 0;
};

/// Sorted by (condition, metric).
std::vector<RegressionTask> build_regression_tasks(const std::vector<MetricObservation>& observations,
                                                   const std::vector<MatchedPair>& pairs);

enum class SigmaPooling {
  Metric,           // control rows of every condition and dataset for the metric
  ConditionMetric,  // control rows of this (condition, metric) only
};

double pooled_control_sd(const std::vector<RegressionTask>& tasks, const RegressionTask& task,
                         SigmaPooling pooling);

struct TreatmentEffect {
  std::string condition;
  std::string metric;
  double beta = 0.0;
  double se_hc3 = 0.0;
  double sigma_control = 0.0;
  double standardized_beta = 0.0;
  double ci_low = 0.0;   // standardized, 95% normal interval from HC3 SE
  double ci_high = 0.0;
  double p_value = 1.0;
  std::size_t n_obs = 0;
  std::size_t n_pairs = 0;
};

TreatmentEffect estimate_effect(const RegressionTask& task, double sigma_control);

// ---------------------------------------------------------------- multinomial logit

struct MnlogitOptions {
  int max_iter = 100;
  double tol = 1e-10;
  bool standardize = true;
  bool intercept = true;
};

struct MnlogitFit {
  Matrix beta;  // p x (C-1); reference class is classes[0]
  std::vector<std::int64_t> classes;
  std::vector<std::string> columns;
  Vector feature_mean;
  Vector feature_sd;
  double llf = 0.0;
  std::vector<double> llf_history;
  int iterations = 0;
  Eigen::Index n = 0;

  Eigen::Index num_params() const { return beta.size(); }
};

/// Newton-Raphson with step halving. Features are z-scored when
/// options.standardize. Throws SingleClass, DegenerateInput (constant
/// feature), PerfectSeparation, NonConvergence.
MnlogitFit mnlogit_fit(const Matrix& features, const std::vector<std::int64_t>& y,
                       const std::vector<std::string>& names, const MnlogitOptions& options = {});

struct LRTest {
  std::string variable;
  double lr_stat = 0.0;
  int df = 0;
  double p_value = 1.0;
};

/// Throws NotNested (df <= 0) and NegativeLR (statistic below -1e-8).
LRTest lr_test(double llf_full, double llf_reduced, int df, std::string variable = {});
LRTest lr_test(const MnlogitFit& full, const MnlogitFit& reduced, std::string variable = {});

/// Full model against each single-variable deletion, in column order.
std::vector<LRTest> drop_one_lr_tests(const Matrix& features, const std::vector<std::int64_t>& y,
                                      const std::vector<std::string>& names,
                                      const MnlogitOptions& options = {});

}  // namespace latentkit
