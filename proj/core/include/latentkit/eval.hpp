#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "latentkit/align.hpp"
#include "latentkit/table.hpp"

namespace latentkit {

/// Mean over rows of the squared Euclidean distance.
double reconstruction_mse(const Matrix& b_hat, const Matrix& b_true);
/// Throws IdMismatch, DimensionMismatch.
double reconstruction_mse(const PointCloud& b_hat, const PointCloud& b_true);

/// One-vs-all least-squares probe: scores = X W + b.
struct ProbeModel {
  Matrix W;                          // d x C
  RowVector b;                       // 1 x C (zero without intercept)
  std::vector<std::int64_t> classes;  // ascending
  bool intercept = true;

  Matrix scores(const Matrix& x) const;
  /// Argmax per row; ties go to the smaller class index.
  std::vector<std::int64_t> predict(const Matrix& x) const;
};

/// Throws SingleClass, DimensionMismatch.
ProbeModel fit_probe(const Matrix& x, const std::vector<std::int64_t>& y, bool intercept = true);
ProbeModel fit_probe(const PointCloud& train, const std::string& label_col, bool intercept = true);

struct EvalReport {
  std::optional<double> mse;
  double accuracy = 0.0;
  double precision_macro = 0.0;
  double recall_macro = 0.0;
  double f1_macro = 0.0;
  std::size_t n_test = 0;
  /// Set by evaluate_alignment.
  std::optional<AlignMethod> method;
  std::optional<int> k;

  nlohmann::json to_json() const;
};

struct ClassScores {
  std::int64_t label = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  std::size_t predicted = 0;
};

/// Per-class scores over the classes present in `truth`, ascending. A class
/// never predicted gets precision 0.
std::vector<ClassScores> per_class_scores(const std::vector<std::int64_t>& truth,
                                          const std::vector<std::int64_t>& predicted);
/// Accuracy and macro averages of per_class_scores. Throws LengthMismatch.
EvalReport classification_report(const std::vector<std::int64_t>& truth,
                                 const std::vector<std::int64_t>& predicted);

/// Throws DimensionMismatch, MissingColumn.
EvalReport probe_metrics(const ProbeModel& m, const PointCloud& test, const std::string& label_col);

/// Transmit A-side test rows, score MSE against the B side and probe the
/// transmitted rows.
EvalReport evaluate_alignment(const AlignmentMap& m, const PairedClouds& test,
                              const ProbeModel& probe, const std::string& label_col);

}  // namespace latentkit
