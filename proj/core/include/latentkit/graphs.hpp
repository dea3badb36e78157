#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "latentkit/linalg.hpp"

namespace latentkit {

/// Simple undirected graph as sorted adjacency lists.
struct LatentGraph {
  int n = 0;
  std::vector<std::vector<int>> adj;
  int built_with_k = 0;

  std::size_t num_edges() const;
  /// Deduplicates edges and drops self-loops.
  static LatentGraph from_edges(int n, const std::vector<std::pair<int, int>>& edges,
                                int built_with_k = 0);
};

/// Exact Euclidean kNN (ties to the smaller index), union-symmetrized.
/// Throws TooFewPoints unless n > k.
LatentGraph knn_graph(const Matrix& x, int k = 10);

/// Component id per vertex, numbered in order of smallest vertex.
std::vector<int> connected_components(const LatentGraph& g, int* count = nullptr);

/// d_T(u, v) + 1 for every non-tree edge of a BFS spanning forest; each
/// component's root is drawn with `seed`.
std::vector<int> fundamental_cycle_lengths(const LatentGraph& g, std::uint64_t seed);

/// Square clustering of one vertex (Lind et al., as in networkx).
double square_clustering(const LatentGraph& g, int v);

/// Second-smallest eigenvalue of the combinatorial Laplacian D - A.
double fiedler_value(const LatentGraph& g);

struct GraphSignatureReport {
  std::optional<double> cycle_length;  // missing for a forest
  double mean_square_clustering = 0.0;
  double wiener_index = 0.0;
  double eigengap = 0.0;
  int diameter = 0;
  int n_components = 0;

  /// (name, value) in a fixed order; missing values are nullopt.
  std::vector<std::pair<std::string, std::optional<double>>> rows() const;
};

/// Throws EmptyGraph.
GraphSignatureReport graph_signatures(const LatentGraph& g, std::uint64_t tree_seed);

}  // namespace latentkit
