#include "latentkit/error.hpp"

namespace latentkit {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::RaggedEmbedding: return "RaggedEmbedding";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::MixedModelName: return "MixedModelName";
    case ErrorCode::EmptyTable: return "EmptyTable";
    case ErrorCode::IdMismatch: return "IdMismatch";
    case ErrorCode::EmptyIntersection: return "EmptyIntersection";
    case ErrorCode::LabelConflict: return "LabelConflict";
    case ErrorCode::MissingKeyColumn: return "MissingKeyColumn";
    case ErrorCode::DuplicateModelName: return "DuplicateModelName";
    case ErrorCode::MalformedFile: return "MalformedFile";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::CholeskyFailure: return "CholeskyFailure";
    case ErrorCode::KOutOfRange: return "KOutOfRange";
    case ErrorCode::EmptyCluster: return "EmptyCluster";
    case ErrorCode::RankDeficientAnchors: return "RankDeficientAnchors";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::MOutOfRange: return "MOutOfRange";
    case ErrorCode::ZeroVarianceCoefficient: return "ZeroVarianceCoefficient";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::LeverageOne: return "LeverageOne";
    case ErrorCode::ZeroControlVariance: return "ZeroControlVariance";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::PerfectSeparation: return "PerfectSeparation";
    case ErrorCode::NotNested: return "NotNested";
    case ErrorCode::NegativeLR: return "NegativeLR";
    case ErrorCode::NoPairsFound: return "NoPairsFound";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace latentkit
