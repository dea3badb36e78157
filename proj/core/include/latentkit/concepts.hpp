#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "latentkit/linalg.hpp"

namespace latentkit {

using AnchorSets = std::vector<std::vector<Eigen::Index>>;

/// Compression map applied to the sampled rows before averaging. An empty
/// function means identity.
using PsiMap = std::function<Matrix(const Matrix&)>;

struct Prototypes {
  Matrix P;                     // kappa x d (d of psi's output)
  AnchorSets anchor_sets;       // kappa sets of row indices, each sorted
  std::vector<int> assignment;  // cluster per row; empty when anchors were supplied
  int clustering_attempts = 0;  // 0 when anchors were supplied
};

struct AnchorOptions {
  /// Samples per cluster; nullopt takes every member.
  std::optional<int> rho;
  std::uint64_t seed = 0;
  /// Supplied anchor sets skip clustering and sampling entirely.
  std::optional<AnchorSets> existing;
  PsiMap psi;
  /// Extra clustering attempts (fresh seeds) when a cluster has fewer than
  /// rho members.
  int max_retries = 3;
};

/// Prototype anchors: k-means (k-means++ init) into kappa clusters, rho rows
/// sampled without replacement from each, prototypes are their psi-means.
/// Throws TooFewSamples, EmptyCluster, InvalidArgument.
Prototypes prototypical_anchors(const Matrix& x, int kappa, const AnchorOptions& options);

/// J_ij = |A_i ∩ B_j| / |A_i ∪ B_j| over shared sample indices (0 when the
/// union is empty). Cluster counts are max(label) + 1. Throws LengthMismatch.
Matrix jaccard_matrix(const std::vector<int>& assign_a, const std::vector<int>& assign_b);

enum class MatchScheme { Hungarian, Injected, Spectral };
std::string_view to_string(MatchScheme scheme);

struct ClusterPair {
  int a = 0;
  int b = 0;
  double similarity = 0.0;
};

struct Matching {
  MatchScheme scheme = MatchScheme::Hungarian;
  /// Hungarian and injected: one-to-one correspondences.
  std::vector<ClusterPair> pairs;
  /// Mean similarity over matched pairs (S_Hung for Hungarian).
  double mean_similarity = 0.0;
  /// Injected: sample indices per cluster. Spectral: joint node ids, with A
  /// clusters as 0..kA-1 and B clusters as kA..kA+kB-1.
  std::vector<std::vector<int>> groups;
  /// Spectral only.
  int k_est = 0;
  Vector eigenvalues;

  nlohmann::json to_json() const;
};

Matching hungarian_match(const Matrix& jaccard);

Matching injected_match(const std::vector<int>& assign_a);

/// Bipartite joint graph [[0, J], [J^T, 0]], symmetric normalized Laplacian,
/// k_est from the largest eigengap over l in [1, N-2] (0-based ascending,
/// smallest l on ties), then k-means on row-normalized leading eigenvectors.
/// Zero-degree nodes become singleton groups. Throws NonFiniteInput and
/// InvalidArgument (negative entries).
Matching spectral_match(const Matrix& jaccard, std::uint64_t seed = 0);

}  // namespace latentkit
