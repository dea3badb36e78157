#include "latentkit/graphs.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <random>
#include <string>

#include "latentkit/error.hpp"

namespace latentkit {
namespace {

constexpr Eigen::Index kKnnBlock = 256;

std::vector<int> bfs_distances(const LatentGraph& g, int src) {
  std::vector<int> dist(static_cast<std::size_t>(g.n), -1);
  std::vector<int> queue;
  queue.reserve(static_cast<std::size_t>(g.n));
  dist[static_cast<std::size_t>(src)] = 0;
  queue.push_back(src);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int u = queue[head];
    for (int w : g.adj[static_cast<std::size_t>(u)]) {
      if (dist[static_cast<std::size_t>(w)] < 0) {
        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(u)] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

}  // namespace

std::size_t LatentGraph::num_edges() const {
  std::size_t total = 0;
  for (const auto& a : adj) total += a.size();
  return total / 2;
}

LatentGraph LatentGraph::from_edges(int n, const std::vector<std::pair<int, int>>& edges,
                                    int built_with_k) {
  LatentGraph g;
  g.n = n;
  g.built_with_k = built_with_k;
  g.adj.assign(static_cast<std::size_t>(n), {});
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n) fail(ErrorCode::InvalidArgument, "edge endpoint out of range");
    if (u == v) continue;
    g.adj[static_cast<std::size_t>(u)].push_back(v);
    g.adj[static_cast<std::size_t>(v)].push_back(u);
  }
  for (auto& a : g.adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  return g;
}

LatentGraph knn_graph(const Matrix& x, int k) {
  const Eigen::Index n = x.rows();
  if (k < 1) fail(ErrorCode::InvalidArgument, "kNN needs k >= 1");
  if (n <= k) {
    fail(ErrorCode::TooFewPoints, "kNN with k=" + std::to_string(k) + " needs more than " +
                                      std::to_string(k) + " points, got " + std::to_string(n));
  }
  const Vector sq = x.rowwise().squaredNorm();
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<std::size_t>(n * k));
  std::vector<std::pair<double, int>> cand(static_cast<std::size_t>(n));
  for (Eigen::Index start = 0; start < n; start += kKnnBlock) {
    const Eigen::Index rows = std::min(kKnnBlock, n - start);
    // |a-b|^2 = |a|^2 + |b|^2 - 2 a.b, one block of rows at a time.
    Matrix d2 = -2.0 * (x.middleRows(start, rows) * x.transpose());
    d2.colwise() += sq.segment(start, rows);
    d2.rowwise() += sq.transpose();
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Eigen::Index i = start + r;
      std::size_t m = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j != i) cand[m++] = {std::max(d2(r, j), 0.0), static_cast<int>(j)};
      }
      std::partial_sort(cand.begin(), cand.begin() + k, cand.begin() + static_cast<std::ptrdiff_t>(m));
      for (int t = 0; t < k; ++t) edges.emplace_back(static_cast<int>(i), cand[static_cast<std::size_t>(t)].second);
    }
  }
  return LatentGraph::from_edges(static_cast<int>(n), edges, k);
}

std::vector<int> connected_components(const LatentGraph& g, int* count) {
  std::vector<int> comp(static_cast<std::size_t>(g.n), -1);
  int c = 0;
  for (int s = 0; s < g.n; ++s) {
    if (comp[static_cast<std::size_t>(s)] >= 0) continue;
    std::vector<int> stack{s};
    comp[static_cast<std::size_t>(s)] = c;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int w : g.adj[static_cast<std::size_t>(u)]) {
        if (comp[static_cast<std::size_t>(w)] < 0) {
          comp[static_cast<std::size_t>(w)] = c;
          stack.push_back(w);
        }
      }
    }
    ++c;
  }
  if (count) *count = c;
  return comp;
}

std::vector<int> fundamental_cycle_lengths(const LatentGraph& g, std::uint64_t seed) {
  int ncomp = 0;
  const auto comp = connected_components(g, &ncomp);
  std::vector<std::vector<int>> members(static_cast<std::size_t>(ncomp));
  for (int v = 0; v < g.n; ++v) members[static_cast<std::size_t>(comp[static_cast<std::size_t>(v)])].push_back(v);

  std::mt19937_64 rng(seed);
  std::vector<int> parent(static_cast<std::size_t>(g.n), -1);
  std::vector<int> depth(static_cast<std::size_t>(g.n), -1);
  for (const auto& mem : members) {
    std::uniform_int_distribution<std::size_t> pick(0, mem.size() - 1);
    const int root = mem[pick(rng)];
    depth[static_cast<std::size_t>(root)] = 0;
    std::queue<int> q;
    q.push(root);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int w : g.adj[static_cast<std::size_t>(u)]) {
        if (depth[static_cast<std::size_t>(w)] < 0) {
          depth[static_cast<std::size_t>(w)] = depth[static_cast<std::size_t>(u)] + 1;
          parent[static_cast<std::size_t>(w)] = u;
          q.push(w);
        }
      }
    }
  }

  std::vector<int> lengths;
  for (int u = 0; u < g.n; ++u) {
    for (int v : g.adj[static_cast<std::size_t>(u)]) {
      if (v <= u) continue;
      if (parent[static_cast<std::size_t>(v)] == u || parent[static_cast<std::size_t>(u)] == v) continue;
      int a = u;
      int b = v;
      int dist = 0;
      while (a != b) {
        if (depth[static_cast<std::size_t>(a)] >= depth[static_cast<std::size_t>(b)]) {
          a = parent[static_cast<std::size_t>(a)];
        } else {
          b = parent[static_cast<std::size_t>(b)];
        }
        ++dist;
      }
      lengths.push_back(dist + 1);
    }
  }
  return lengths;
}

double square_clustering(const LatentGraph& g, int v) {
  const auto& nv = g.adj[static_cast<std::size_t>(v)];
  double squares_total = 0.0;
  double potential = 0.0;
  std::vector<int> common;
  for (std::size_t a = 0; a < nv.size(); ++a) {
    for (std::size_t b = a + 1; b < nv.size(); ++b) {
      const int u = nv[a];
      const int w = nv[b];
      const auto& nu = g.adj[static_cast<std::size_t>(u)];
      const auto& nw = g.adj[static_cast<std::size_t>(w)];
      common.clear();
      std::set_intersection(nu.begin(), nu.end(), nw.begin(), nw.end(), std::back_inserter(common));
      const double squares =
          static_cast<double>(common.size()) - (std::binary_search(common.begin(), common.end(), v) ? 1.0 : 0.0);
      squares_total += squares;
      double degm = squares + 1.0;
      if (std::binary_search(nu.begin(), nu.end(), w)) degm += 1.0;
      potential += (static_cast<double>(nu.size()) - degm) + (static_cast<double>(nw.size()) - degm) + squares;
    }
  }
  return potential > 0 ? squares_total / potential : 0.0;
}

double fiedler_value(const LatentGraph& g) {
  if (g.n < 2) return 0.0;
  Matrix lap = Matrix::Zero(g.n, g.n);
  for (int u = 0; u < g.n; ++u) {
    lap(u, u) = static_cast<double>(g.adj[static_cast<std::size_t>(u)].size());
    for (int w : g.adj[static_cast<std::size_t>(u)]) lap(u, w) = -1.0;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(lap, Eigen::EigenvaluesOnly);
  return std::max(eig.eigenvalues()(1), 0.0);
}

GraphSignatureReport graph_signatures(const LatentGraph& g, std::uint64_t tree_seed) {
  if (g.n == 0) fail(ErrorCode::EmptyGraph, "graph has no vertices");
  GraphSignatureReport r;
  connected_components(g, &r.n_components);

  const auto lengths = fundamental_cycle_lengths(g, tree_seed);
  if (!lengths.empty()) {
    r.cycle_length = std::accumulate(lengths.begin(), lengths.end(), 0.0) / static_cast<double>(lengths.size());
  }

  double c4 = 0.0;
  for (int v = 0; v < g.n; ++v) c4 += square_clustering(g, v);
  r.mean_square_clustering = c4 / g.n;

  double wiener = 0.0;
  int diameter = 0;
  for (int s = 0; s < g.n; ++s) {
    const auto dist = bfs_distances(g, s);
    for (int t = s + 1; t < g.n; ++t) {
      const int d = dist[static_cast<std::size_t>(t)];
      if (d > 0) {
        wiener += d;
        diameter = std::max(diameter, d);
      }
    }
  }
  r.wiener_index = wiener;
  r.diameter = diameter;
  r.eigengap = r.n_components > 1 ? 0.0 : fiedler_value(g);
  return r;
}

std::vector<std::pair<std::string, std::optional<double>>> GraphSignatureReport::rows() const {
  return {{"cycle_length", cycle_length},
          {"mean_square_clustering", mean_square_clustering},
          {"wiener_index", wiener_index},
          {"eigengap", eigengap},
          {"diameter", static_cast<double>(diameter)},
          {"n_components", static_cast<double>(n_components)}};
}

}  // namespace latentkit
