#include "latentkit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <tuple>

#include "latentkit/chi2.hpp"
#include "latentkit/error.hpp"

namespace latentkit {

std::optional<Eigen::Index> DesignMatrix::column(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) return std::nullopt;
  return static_cast<Eigen::Index>(it - columns.begin());
}

DesignMatrix treatment_design(const Vector& y, const std::vector<int>& treated,
                              const std::vector<Factor>& factors) {
  const auto n = y.size();
  if (static_cast<Eigen::Index>(treated.size()) != n) {
    fail(ErrorCode::LengthMismatch, "treated indicator has " + std::to_string(treated.size()) +
                                        " entries for " + std::to_string(n) + " rows");
  }
  DesignMatrix dm;
  dm.y = y;
  dm.columns = {"intercept", "treated"};
  std::vector<std::vector<double>> cols;
  cols.emplace_back(static_cast<std::size_t>(n), 1.0);
  cols.emplace_back(treated.begin(), treated.end());
  for (const auto& f : factors) {
    if (static_cast<Eigen::Index>(f.values.size()) != n) {
      fail(ErrorCode::LengthMismatch, "factor '" + f.name + "' has wrong length");
    }
    std::set<std::string> levels(f.values.begin(), f.values.end());
    if (levels.empty()) continue;
    for (auto it = std::next(levels.begin()); it != levels.end(); ++it) {
      std::vector<double> col(static_cast<std::size_t>(n), 0.0);
      for (Eigen::Index i = 0; i < n; ++i) col[i] = f.values[i] == *it ? 1.0 : 0.0;
      cols.push_back(std::move(col));
      dm.columns.push_back(f.name + "[" + *it + "]");
    }
  }
  dm.X.resize(n, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    for (Eigen::Index i = 0; i < n; ++i) dm.X(i, static_cast<Eigen::Index>(j)) = cols[j][i];
  }
  return dm;
}

OlsFit ols_hc3(const DesignMatrix& dm) {
  const Matrix& X = dm.X;
  const auto n = X.rows();
  const auto p = X.cols();
  if (dm.y.size() != n) fail(ErrorCode::DimensionMismatch, "y length does not match X rows");
  linalg::require_finite(X, "design matrix");
  if (!dm.y.allFinite()) fail(ErrorCode::NonFiniteInput, "response contains non-finite values");
  if (n <= p) {
    fail(ErrorCode::RankDeficient,
         "n = " + std::to_string(n) + " observations for p = " + std::to_string(p) + " parameters");
  }
  Eigen::ColPivHouseholderQR<Matrix> rank_qr(X);
  rank_qr.setThreshold(1e-10);
  if (rank_qr.rank() < p) {
    fail(ErrorCode::RankDeficient,
         "design rank " + std::to_string(rank_qr.rank()) + " < " + std::to_string(p) + " columns");
  }

  Eigen::HouseholderQR<Matrix> qr(X);
  const Matrix Q = qr.householderQ() * Matrix::Identity(n, p);
  const Matrix R = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
  const Matrix Rinv =
      R.triangularView<Eigen::Upper>().solve(Matrix::Identity(p, p));

  OlsFit fit;
  fit.n = n;
  fit.p = p;
  fit.columns = dm.columns;
  fit.beta = Rinv * (Q.transpose() * dm.y);
  fit.residuals = dm.y - X * fit.beta;
  fit.leverage = Q.rowwise().squaredNorm();

  const Matrix bread = Rinv * Rinv.transpose();
  Vector w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double one_minus_h = 1.0 - fit.leverage(i);
    if (one_minus_h < 1e-10) {
      fail(ErrorCode::LeverageOne, "observation " + std::to_string(i) + " has leverage 1");
    }
    const double e = fit.residuals(i) / one_minus_h;
    w(i) = e * e;
  }
  const Matrix meat = X.transpose() * w.asDiagonal() * X;
  fit.cov_hc3 = bread * meat * bread;
  const double s2 = fit.residuals.squaredNorm() / static_cast<double>(n - p);
  fit.cov_classical = s2 * bread;
  return fit;
}

double control_sd(std::span<const double> v) {
  if (v.size() < 2) fail(ErrorCode::ZeroControlVariance, "fewer than two control observations");
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  if (!(sd > 0.0)) fail(ErrorCode::ZeroControlVariance, "control values have zero spread");
  return sd;
}

double standardize_effect(double beta, std::span<const double> control_values) {
  return beta / control_sd(control_values);
}

double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

// ---------------------------------------------------------------- treatment regressions

std::vector<RegressionTask> build_regression_tasks(const std::vector<MetricObservation>& observations,
                                                   const std::vector<MatchedPair>& pairs) {
  using Key = std::tuple<std::string, std::string, std::string>;  // model, dataset, metric
  std::map<Key, double> value;
  std::set<std::string> metrics;
  std::map<std::string, std::set<std::string>> datasets_of_metric;
  for (const auto& o : observations) {
    Key key{o.model_name, o.dataset, o.metric};
    auto [it, inserted] = value.emplace(key, o.value);
    if (!inserted && it->second != o.value) {
      fail(ErrorCode::InvalidArgument, "conflicting values for model '" + o.model_name +
                                           "', dataset '" + o.dataset + "', metric '" + o.metric +
                                           "'");
    }
    metrics.insert(o.metric);
    datasets_of_metric[o.metric].insert(o.dataset);
  }

  std::map<std::string, std::vector<const MatchedPair*>> by_condition;
  for (const auto& p : pairs) by_condition[p.condition].push_back(&p);

  std::vector<RegressionTask> tasks;
  for (const auto& [condition, cpairs] : by_condition) {
    for (const auto& metric : metrics) {
      std::vector<double> ys;
      std::vector<int> treated;
      Factor family{"family", {}};
      Factor dataset{"dataset", {}};
      std::set<const MatchedPair*> used;
      for (const auto* p : cpairs) {
        for (const auto& ds : datasets_of_metric[metric]) {
          auto c = value.find({p->control, ds, metric});
          auto t = value.find({p->treatment, ds, metric});
          if (c == value.end() || t == value.end()) continue;
          used.insert(p);
          for (int arm = 0; arm < 2; ++arm) {
            ys.push_back(arm == 0 ? c->second : t->second);
            treated.push_back(arm);
            family.values.push_back(p->family);
            dataset.values.push_back(ds);
          }
        }
      }
      if (ys.empty()) continue;
      RegressionTask task;
      task.condition = condition;
      task.metric = metric;
      task.n_pairs = used.size();
      Vector y = Eigen::Map<const Vector>(ys.data(), static_cast<Eigen::Index>(ys.size()));
      task.design = treatment_design(y, treated, {family, dataset});
      for (std::size_t i = 0; i < ys.size(); ++i) {
        if (treated[i] == 0) task.control_values.push_back(ys[i]);
      }
      tasks.push_back(std::move(task));
    }
  }
  return tasks;
}

double pooled_control_sd(const std::vector<RegressionTask>& tasks, const RegressionTask& task,
                         SigmaPooling pooling) {
  if (pooling == SigmaPooling::ConditionMetric) return control_sd(task.control_values);
  std::vector<double> pooled;
  for (const auto& t : tasks) {
    if (t.metric != task.metric) continue;
    pooled.insert(pooled.end(), t.control_values.begin(), t.control_values.end());
  }
  return control_sd(pooled);
}

TreatmentEffect estimate_effect(const RegressionTask& task, double sigma_control) {
  if (!(sigma_control > 0.0)) {
    fail(ErrorCode::ZeroControlVariance, "sigma_control must be positive");
  }
  const OlsFit fit = ols_hc3(task.design);
  const auto j = *task.design.column("treated");
  TreatmentEffect e;
  e.condition = task.condition;
  e.metric = task.metric;
  e.beta = fit.beta(j);
  e.se_hc3 = std::sqrt(fit.cov_hc3(j, j));
  e.sigma_control = sigma_control;
  e.standardized_beta = e.beta / sigma_control;
  const double se_std = e.se_hc3 / sigma_control;
  e.ci_low = e.standardized_beta - kZ975 * se_std;
  e.ci_high = e.standardized_beta + kZ975 * se_std;
  e.p_value = e.se_hc3 > 0.0 ? normal_two_sided_p(e.beta / e.se_hc3) : (e.beta == 0.0 ? 1.0 : 0.0);
  e.n_obs = static_cast<std::size_t>(fit.n);
  e.n_pairs = task.n_pairs;
  return e;
}

// ---------------------------------------------------------------- multinomial logit

namespace {

struct MnlState {
  double llf = 0.0;
  Matrix prob;  // n x C, column 0 is the reference
};

MnlState evaluate(const Matrix& X, const Matrix& beta, const std::vector<int>& yi) {
  const auto n = X.rows();
  const auto J = beta.cols();
  MnlState s;
  s.prob.resize(n, J + 1);
  s.prob.col(0).setZero();
  s.prob.rightCols(J) = X * beta;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = std::max(0.0, s.prob.row(i).maxCoeff());
    double z = 0.0;
    for (Eigen::Index c = 0; c <= J; ++c) {
      s.prob(i, c) = std::exp(s.prob(i, c) - m);
      z += s.prob(i, c);
    }
    s.prob.row(i) /= z;
    s.llf += std::log(std::max(s.prob(i, yi[i]), std::numeric_limits<double>::min()));
  }
  return s;
}

}  // namespace

MnlogitFit mnlogit_fit(const Matrix& features, const std::vector<std::int64_t>& y,
                       const std::vector<std::string>& names, const MnlogitOptions& options) {
  const auto n = features.rows();
  const auto q = features.cols();
  if (static_cast<Eigen::Index>(y.size()) != n) {
    fail(ErrorCode::LengthMismatch, "label count does not match feature rows");
  }
  if (static_cast<Eigen::Index>(names.size()) != q) {
    fail(ErrorCode::LengthMismatch, "feature name count does not match feature columns");
  }
  linalg::require_finite(features, "features");

  MnlogitFit fit;
  fit.n = n;
  fit.classes = y;
  std::sort(fit.classes.begin(), fit.classes.end());
  fit.classes.erase(std::unique(fit.classes.begin(), fit.classes.end()), fit.classes.end());
  if (fit.classes.size() < 2) fail(ErrorCode::SingleClass, "outcome has a single class");
  std::vector<int> yi(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    yi[i] = static_cast<int>(std::lower_bound(fit.classes.begin(), fit.classes.end(), y[i]) -
                             fit.classes.begin());
  }

  fit.feature_mean = Vector::Zero(q);
  fit.feature_sd = Vector::Ones(q);
  Matrix Z = features;
  if (options.standardize && n > 1) {
    fit.feature_mean = features.colwise().mean().transpose();
    for (Eigen::Index j = 0; j < q; ++j) {
      const double ss = (features.col(j).array() - fit.feature_mean(j)).square().sum();
      const double sd = std::sqrt(ss / static_cast<double>(n - 1));
      if (!(sd > 0.0)) fail(ErrorCode::DegenerateInput, "feature '" + names[j] + "' is constant");
      fit.feature_sd(j) = sd;
      Z.col(j) = (features.col(j).array() - fit.feature_mean(j)) / sd;
    }
  }
  Matrix X(n, q + (options.intercept ? 1 : 0));
  if (options.intercept) {
    X.col(0).setOnes();
    X.rightCols(q) = Z;
    fit.columns.push_back("intercept");
  } else {
    X = Z;
  }
  fit.columns.insert(fit.columns.end(), names.begin(), names.end());

  const auto p = X.cols();
  const auto J = static_cast<Eigen::Index>(fit.classes.size()) - 1;
  Matrix beta = Matrix::Zero(p, J);
  MnlState state = evaluate(X, beta, yi);
  fit.llf_history.push_back(state.llf);

  Matrix Y = Matrix::Zero(n, J + 1);
  for (Eigen::Index i = 0; i < n; ++i) Y(i, yi[i]) = 1.0;

  bool converged = false;
  double grad_norm = 0.0;
  int it = 0;
  for (; it < options.max_iter; ++it) {
    // Gradient and Hessian of the log-likelihood, parameters stacked by class.
    Vector g(p * J);
    for (Eigen::Index j = 0; j < J; ++j) {
      g.segment(j * p, p) = X.transpose() * (Y.col(j + 1) - state.prob.col(j + 1));
    }
    grad_norm = g.norm();
    Matrix info(p * J, p * J);
    for (Eigen::Index a = 0; a < J; ++a) {
      for (Eigen::Index b = a; b < J; ++b) {
        Vector w = -state.prob.col(a + 1).cwiseProduct(state.prob.col(b + 1));
        if (a == b) w += state.prob.col(a + 1);
        const Matrix block = X.transpose() * w.asDiagonal() * X;
        info.block(a * p, b * p, p, p) = block;
        info.block(b * p, a * p, p, p) = block.transpose();
      }
    }
    Eigen::LDLT<Matrix> ldlt(info);
    Vector step = ldlt.solve(g);
    if (ldlt.info() != Eigen::Success || !step.allFinite()) {
      step = linalg::pseudo_inverse(info) * g;
    }
    Matrix dir = Eigen::Map<const Matrix>(step.data(), p, J);

    double t = 1.0;
    Matrix candidate;
    MnlState next;
    for (int h = 0; h < 30; ++h) {
      candidate = beta + t * dir;
      next = evaluate(X, candidate, yi);
      if (next.llf >= state.llf - 1e-12 * std::abs(state.llf)) break;
      t *= 0.5;
    }
    const double change = next.llf - state.llf;
    beta = candidate;
    state = std::move(next);
    fit.llf_history.push_back(state.llf);

    if (beta.norm() > 1e4 || state.llf > -1e-8) {
      fail(ErrorCode::PerfectSeparation,
           "coefficients diverge (norm " + std::to_string(beta.norm()) + ", llf " +
               std::to_string(state.llf) + ")");
    }
    if (std::abs(change) <= options.tol * std::max(1.0, std::abs(state.llf)) ||
        (t * dir).cwiseAbs().maxCoeff() < 1e-12) {
      converged = true;
      ++it;
      break;
    }
  }
  if (!converged) {
    fail(ErrorCode::NonConvergence, "no convergence after " + std::to_string(it) +
                                        " iterations (gradient norm " +
                                        std::to_string(grad_norm) + ")");
  }
  fit.beta = beta;
  fit.llf = state.llf;
  fit.iterations = it;
  return fit;
}

LRTest lr_test(double llf_full, double llf_reduced, int df, std::string variable) {
  if (df <= 0) fail(ErrorCode::NotNested, "degrees of freedom must be positive");
  double stat = 2.0 * (llf_full - llf_reduced);
  if (stat < -1e-8) {
    fail(ErrorCode::NegativeLR, "likelihood ratio statistic " + std::to_string(stat) + " < 0");
  }
  stat = std::max(stat, 0.0);
  return {std::move(variable), stat, df, chi2_sf(stat, static_cast<double>(df))};
}

LRTest lr_test(const MnlogitFit& full, const MnlogitFit& reduced, std::string variable) {
  if (full.n != reduced.n || full.classes != reduced.classes) {
    fail(ErrorCode::NotNested, "fits use different samples or outcome classes");
  }
  const auto df = static_cast<int>(full.num_params() - reduced.num_params());
  return lr_test(full.llf, reduced.llf, df, std::move(variable));
}

std::vector<LRTest> drop_one_lr_tests(const Matrix& features, const std::vector<std::int64_t>& y,
                                      const std::vector<std::string>& names,
                                      const MnlogitOptions& options) {
  const MnlogitFit full = mnlogit_fit(features, y, names, options);
  std::vector<LRTest> out;
  const auto q = features.cols();
  for (Eigen::Index drop = 0; drop < q; ++drop) {
    Matrix reduced(features.rows(), q - 1);
    std::vector<std::string> rnames;
    for (Eigen::Index j = 0, c = 0; j < q; ++j) {
      if (j == drop) continue;
      reduced.col(c++) = features.col(j);
      rnames.push_back(names[j]);
    }
    MnlogitFit rfit = (q == 1 && !options.intercept)
                          ? MnlogitFit{}
                          : mnlogit_fit(reduced, y, rnames, options);
    if (q == 1 && !options.intercept) {
      // Empty model: uniform class probabilities.
      rfit.n = full.n;
      rfit.classes = full.classes;
      rfit.llf = -static_cast<double>(full.n) * std::log(static_cast<double>(full.classes.size()));
    }
    out.push_back(lr_test(full, rfit, names[drop]));
  }
  return out;
}

}  // namespace latentkit
