#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace latentkit {

enum class ErrorCode {
  // ingest
  MissingColumn,
  RaggedEmbedding,
  DuplicateId,
  MixedModelName,
  EmptyTable,
  IdMismatch,
  EmptyIntersection,
  LabelConflict,
  MissingKeyColumn,
  DuplicateModelName,
  MalformedFile,
  UnsupportedFormat,
  // numerics shared across modules
  InvalidArgument,
  DimensionMismatch,
  DegenerateInput,
  NonFiniteInput,
  CholeskyFailure,
  // align
  KOutOfRange,
  EmptyCluster,
  RankDeficientAnchors,
  // eval
  SingleClass,
  // concepts
  TooFewSamples,
  LengthMismatch,
  // geometry
  MOutOfRange,
  ZeroVarianceCoefficient,
  // graphs
  TooFewPoints,
  EmptyGraph,
  // stats
  RankDeficient,
  LeverageOne,
  ZeroControlVariance,
  NonConvergence,
  PerfectSeparation,
  NotNested,
  NegativeLR,
  // pairing
  NoPairsFound,
  // cli
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI's per-job error reporting) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace latentkit
