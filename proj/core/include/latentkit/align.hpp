#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <variant>

#include <nlohmann/json_fwd.hpp>

#include "latentkit/concepts.hpp"
#include "latentkit/table.hpp"
#include "latentkit/whiten.hpp"

namespace latentkit {

enum class AlignMethod { Ppfe, Linear, Cca };
std::string_view to_string(AlignMethod method);
std::optional<AlignMethod> parse_align_method(std::string_view name);

/// Parseval frames built from prototype anchors, in whitened coordinates.
/// Transmission: b~ = a~ F_T F_R^T (row vectors).
struct PpfeOperator {
  Matrix F_T;  // d_A x kappa
  Matrix F_R;  // d_B x kappa
  AnchorSets anchors;
};

/// Thin SVD of the full least-squares operator A = U diag(sigma) V^T
/// (d_B x d_A, whitened coordinates). Shared by every truncation.
struct LinearSvd {
  Matrix U;
  Vector sigma;
  Matrix V;
};

struct LinearOperator {
  std::shared_ptr<const LinearSvd> svd;
};

/// Whitened cross-covariance T = S_AA^{-1/2} S_AB S_BB^{-1/2} = U diag(rho) V^T
/// plus the pieces needed to rebuild W_A, W_B for any k.
struct CcaBasis {
  Matrix saa_isqrt;
  Matrix sbb_isqrt;
  Matrix U;
  Matrix V;
  Vector correlations;
};

/// Transmission: b^ = (a - mu_A) W_A pinv(W_B) + mu_B.
struct CcaOperator {
  Matrix W_A;  // d_A x k
  Matrix W_B;  // d_B x k
  Matrix W_B_pinv;  // k x d_B
  Vector mu_A;
  Vector mu_B;
  Vector correlations;  // first k canonical correlations
  std::shared_ptr<const CcaBasis> basis;  // absent after deserialization
};

struct AlignmentMap {
  AlignMethod method = AlignMethod::Linear;
  int k = 0;
  std::optional<WhitenModel> whiten_a;  // ppfe and linear
  std::optional<WhitenModel> whiten_b;
  std::variant<PpfeOperator, LinearOperator, CcaOperator> op;

  Eigen::Index source_dim() const;
  Eigen::Index target_dim() const;

  /// The map applied to source rows (right-multiplication): F_T F_R^T for
  /// ppfe, A_k^T for linear (both whitened), W_A pinv(W_B) for cca.
  Matrix right_operator() const;

  nlohmann::json to_json() const;
  static AlignmentMap from_json(const nlohmann::json& j);
};

inline constexpr int kDefaultPpfeRho = 32;

struct PpfeOptions {
  /// Samples per cluster. nullopt takes every member, which on centered
  /// (whitened) data makes the prototypes linearly dependent.
  std::optional<int> rho = kDefaultPpfeRho;
  std::uint64_t seed = 0;
  double epsilon = kDefaultEpsilon;
  PsiMap psi;
  int max_retries = 3;
};

/// Throws KOutOfRange (kappa > min(d_A, d_B)), EmptyCluster, TooFewSamples,
/// RankDeficientAnchors.
AlignmentMap fit_ppfe(const PairedClouds& pair, int kappa, const PpfeOptions& options = {});

/// Full-rank map, k = min(d_A, d_B). Throws DegenerateInput.
AlignmentMap fit_linear(const PairedClouds& pair, double epsilon = kDefaultEpsilon);
/// Throws KOutOfRange unless 1 <= k <= min(d_A, d_B).
AlignmentMap truncate_linear(const AlignmentMap& full, int k);

/// Throws KOutOfRange, NonFiniteInput, DegenerateInput.
AlignmentMap fit_cca(const PairedClouds& pair, int k, double epsilon = kDefaultEpsilon);
/// Re-derives W_A, W_B for a new k from the stored decomposition.
AlignmentMap truncate_cca(const AlignmentMap& fitted, int k);

/// Throws DimensionMismatch.
Matrix transmit(const AlignmentMap& m, const Matrix& a);
/// Output keeps the input ids and labels.
PointCloud transmit(const AlignmentMap& m, const PointCloud& a);

}  // namespace latentkit
