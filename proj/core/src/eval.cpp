#include "latentkit/eval.hpp"

#include <algorithm>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "latentkit/error.hpp"

namespace latentkit {

double reconstruction_mse(const Matrix& b_hat, const Matrix& b_true) {
  if (b_hat.rows() != b_true.rows() || b_hat.cols() != b_true.cols()) {
    fail(ErrorCode::DimensionMismatch, "MSE inputs differ in shape");
  }
  if (b_hat.rows() == 0) fail(ErrorCode::EmptyTable, "MSE of zero rows");
  return (b_hat - b_true).rowwise().squaredNorm().mean();
}

double reconstruction_mse(const PointCloud& b_hat, const PointCloud& b_true) {
  if (b_hat.ids != b_true.ids) fail(ErrorCode::IdMismatch, "MSE inputs are not id-aligned");
  return reconstruction_mse(b_hat.X, b_true.X);
}

Matrix ProbeModel::scores(const Matrix& x) const {
  if (x.cols() != W.rows()) {
    fail(ErrorCode::DimensionMismatch, "probe expects " + std::to_string(W.rows()) +
                                           " features, got " + std::to_string(x.cols()));
  }
  Matrix s = x * W;
  s.rowwise() += b;
  return s;
}

std::vector<std::int64_t> ProbeModel::predict(const Matrix& x) const {
  const Matrix s = scores(x);
  std::vector<std::int64_t> out(static_cast<std::size_t>(s.rows()));
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    Eigen::Index arg = 0;
    for (Eigen::Index c = 1; c < s.cols(); ++c) {
      if (s(i, c) > s(i, arg)) arg = c;
    }
    out[static_cast<std::size_t>(i)] = classes[static_cast<std::size_t>(arg)];
  }
  return out;
}

ProbeModel fit_probe(const Matrix& x, const std::vector<std::int64_t>& y, bool intercept) {
  if (static_cast<Eigen::Index>(y.size()) != x.rows()) {
    fail(ErrorCode::DimensionMismatch, "probe labels differ in length from rows");
  }
  ProbeModel m;
  m.intercept = intercept;
  m.classes = y;
  std::sort(m.classes.begin(), m.classes.end());
  m.classes.erase(std::unique(m.classes.begin(), m.classes.end()), m.classes.end());
  if (m.classes.size() < 2) fail(ErrorCode::SingleClass, "probe needs at least two classes");

  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const auto c = static_cast<Eigen::Index>(m.classes.size());
  Matrix design(n, d + (intercept ? 1 : 0));
  design.leftCols(d) = x;
  if (intercept) design.col(d).setOnes();
  Matrix targets = Matrix::Zero(n, c);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto it = std::lower_bound(m.classes.begin(), m.classes.end(), y[static_cast<std::size_t>(i)]);
    targets(i, it - m.classes.begin()) = 1.0;
  }
  const Matrix coef = linalg::pseudo_inverse(design) * targets;
  m.W = coef.topRows(d);
  m.b = intercept ? RowVector(coef.row(d)) : RowVector::Zero(c);
  return m;
}

ProbeModel fit_probe(const PointCloud& train, const std::string& label_col, bool intercept) {
  return fit_probe(train.X, train.label(label_col), intercept);
}

std::vector<ClassScores> per_class_scores(const std::vector<std::int64_t>& truth,
                                          const std::vector<std::int64_t>& predicted) {
  if (truth.size() != predicted.size()) {
    fail(ErrorCode::LengthMismatch, "truth and predictions differ in length");
  }
  std::map<std::int64_t, ClassScores> by_class;
  for (auto t : truth) {
    auto& s = by_class[t];
    s.label = t;
    ++s.support;
  }
  std::map<std::int64_t, std::size_t> correct;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (auto it = by_class.find(predicted[i]); it != by_class.end()) ++it->second.predicted;
    if (truth[i] == predicted[i]) ++correct[truth[i]];
  }
  std::vector<ClassScores> out;
  for (auto& [label, s] : by_class) {
    const auto tp = static_cast<double>(correct[label]);
    s.recall = tp / static_cast<double>(s.support);
    s.precision = s.predicted > 0 ? tp / static_cast<double>(s.predicted) : 0.0;
    s.f1 = s.precision + s.recall > 0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    out.push_back(s);
  }
  return out;
}

EvalReport classification_report(const std::vector<std::int64_t>& truth,
                                 const std::vector<std::int64_t>& predicted) {
  const auto classes = per_class_scores(truth, predicted);
  EvalReport r;
  r.n_test = truth.size();
  if (truth.empty()) return r;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += truth[i] == predicted[i] ? 1 : 0;
  r.accuracy = static_cast<double>(hits) / static_cast<double>(truth.size());
  for (const auto& c : classes) {
    r.precision_macro += c.precision;
    r.recall_macro += c.recall;
    r.f1_macro += c.f1;
  }
  const auto nc = static_cast<double>(classes.size());
  r.precision_macro /= nc;
  r.recall_macro /= nc;
  r.f1_macro /= nc;
  return r;
}

EvalReport probe_metrics(const ProbeModel& m, const PointCloud& test, const std::string& label_col) {
  return classification_report(test.label(label_col), m.predict(test.X));
}

EvalReport evaluate_alignment(const AlignmentMap& m, const PairedClouds& test,
                              const ProbeModel& probe, const std::string& label_col) {
  const PointCloud b_hat = transmit(m, test.A);
  EvalReport r = probe_metrics(probe, b_hat, label_col);
  r.mse = reconstruction_mse(b_hat, test.B);
  r.method = m.method;
  r.k = m.k;
  return r;
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json j;
  if (method) j["method"] = std::string(to_string(*method));
  if (k) j["k"] = *k;
  j["mse"] = mse ? nlohmann::json(*mse) : nlohmann::json(nullptr);
  j["accuracy"] = accuracy;
  j["precision_macro"] = precision_macro;
  j["recall_macro"] = recall_macro;
  j["f1_macro"] = f1_macro;
  j["n_test"] = n_test;
  return j;
}

}  // namespace latentkit
