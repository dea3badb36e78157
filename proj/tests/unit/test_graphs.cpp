#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "graph_corpus.hpp"
#include "latentkit/error.hpp"
#include "latentkit/graphs.hpp"
#include "oracles.hpp"

using namespace latentkit;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::ConfigError;
}

using Edges = std::vector<std::pair<int, int>>;

LatentGraph path(int n) {
  Edges e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return LatentGraph::from_edges(n, e);
}

LatentGraph cycle(int n) {
  Edges e;
  for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return LatentGraph::from_edges(n, e);
}

}  // namespace

TEST(Graph, FromEdgesNormalizes) {
  const LatentGraph g = LatentGraph::from_edges(4, {{0, 1}, {1, 0}, {2, 2}, {3, 1}, {0, 1}});
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_EQ(g.adj[1], (std::vector<int>{0, 3}));
  EXPECT_TRUE(g.adj[2].empty());
}

TEST(Knn, MatchesBruteForce) {
  const Matrix x = fixtures::gaussian(40, 3, 13);
  const int k = 4;
  const LatentGraph g = knn_graph(x, k);
  EXPECT_EQ(g.built_with_k, k);
  std::set<std::pair<int, int>> want;
  for (int i = 0; i < 40; ++i) {
    std::vector<std::pair<double, int>> d;
    for (int j = 0; j < 40; ++j) {
      if (j != i) d.emplace_back((x.row(i) - x.row(j)).squaredNorm(), j);
    }
    std::sort(d.begin(), d.end());
    for (int t = 0; t < k; ++t) {
      const int j = d[static_cast<std::size_t>(t)].second;
      want.emplace(std::min(i, j), std::max(i, j));
    }
  }
  std::set<std::pair<int, int>> got;
  for (int v = 0; v < g.n; ++v) {
    for (int u : g.adj[static_cast<std::size_t>(v)]) got.emplace(std::min(u, v), std::max(u, v));
  }
  EXPECT_EQ(got, want);
  for (int v = 0; v < g.n; ++v) EXPECT_GE(g.adj[static_cast<std::size_t>(v)].size(), static_cast<std::size_t>(k));
}

TEST(Knn, TiesGoToSmallerIndex) {
  // Points 1 and 2 are equidistant from 0.
  Matrix x(4, 1);
  x << 0.0, 1.0, -1.0, -1.5;
  const LatentGraph g = knn_graph(x, 1);
  EXPECT_EQ(g.adj[0], (std::vector<int>{1}));
  EXPECT_EQ(code_of([&] { knn_graph(x, 4); }), ErrorCode::TooFewPoints);
}

TEST(Components, NumberedBySmallestVertex) {
  const LatentGraph g = LatentGraph::from_edges(6, {{4, 5}, {1, 3}, {0, 3}});
  int count = 0;
  EXPECT_EQ(connected_components(g, &count), (std::vector<int>{0, 0, 1, 0, 2, 2}));
  EXPECT_EQ(count, 3);
}

TEST(Signatures, SmallClosedForms) {
  const auto p3 = graph_signatures(path(3), 0);
  EXPECT_EQ(p3.wiener_index, 4.0);
  EXPECT_EQ(p3.diameter, 2);
  EXPECT_FALSE(p3.cycle_length);
  EXPECT_EQ(p3.mean_square_clustering, 0.0);

  const auto c4 = graph_signatures(cycle(4), 0);
  ASSERT_TRUE(c4.cycle_length);
  EXPECT_EQ(*c4.cycle_length, 4.0);
  EXPECT_EQ(c4.mean_square_clustering, 1.0);
  EXPECT_EQ(c4.wiener_index, 8.0);
  EXPECT_NEAR(c4.eigengap, 2.0, 1e-12);

  const auto c7 = graph_signatures(cycle(7), 5);
  EXPECT_EQ(*c7.cycle_length, 7.0);
  EXPECT_EQ(c7.diameter, 3);
  EXPECT_EQ(code_of([] { graph_signatures(LatentGraph::from_edges(0, {}), 0); }), ErrorCode::EmptyGraph);
}

TEST(Signatures, NetworkxHandPicked) {
  struct Case {
    int n;
    Edges edges;
    std::vector<double> sq;
    double wiener;
    int diameter;
  };
  const std::vector<Case> cases{
      {4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}}, {1.0 / 3, 1, 1.0 / 3, 1}, 7, 2},
      {4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}, {1, 1, 1, 1}, 6, 1},
      {9,
       {{0, 1}, {0, 3}, {1, 2}, {1, 4}, {2, 5}, {3, 4}, {3, 6}, {4, 5}, {4, 7}, {5, 8}, {6, 7}, {7, 8}},
       {1.0 / 3, .25, 1.0 / 3, .25, .2, .25, 1.0 / 3, .25, 1.0 / 3},
       72,
       4},
      {10,
       {{0, 1}, {0, 6}, {0, 9}, {1, 7}, {1, 8}, {2, 4}, {2, 7}, {2, 8}, {3, 7}, {3, 8}, {3, 9}, {4, 7}, {5, 7},
        {6, 8}, {7, 8}, {7, 9}},
       {0.25, 0.2222222222222222, 0.2, 0.17647058823529413, 0.2, 0, 0.2, 0.0967741935483871, 0.15, 0.125},
       79,
       3},
  };
  for (const auto& c : cases) {
    const LatentGraph g = LatentGraph::from_edges(c.n, c.edges);
    for (int v = 0; v < c.n; ++v) EXPECT_NEAR(square_clustering(g, v), c.sq[static_cast<std::size_t>(v)], 1e-12);
    const auto r = graph_signatures(g, 1);
    EXPECT_EQ(r.wiener_index, c.wiener);
    EXPECT_EQ(r.diameter, c.diameter);
  }
}

TEST(Signatures, NetworkxCorpus) {
  const auto corpus = fixtures::load_graph_corpus(std::string(LATENTKIT_TEST_DATA) + "/graph_corpus.json");
  ASSERT_EQ(corpus.size(), 100u);
  for (const auto& ref : corpus) {
    const auto r = graph_signatures(ref.graph, 3);
    for (int v = 0; v < ref.graph.n; ++v) {
      EXPECT_NEAR(square_clustering(ref.graph, v), ref.square_clustering[static_cast<std::size_t>(v)], 1e-12);
    }
    EXPECT_EQ(r.wiener_index, ref.wiener_index);
    EXPECT_EQ(r.diameter, ref.diameter);
    EXPECT_EQ(r.n_components, ref.n_components);
    EXPECT_NEAR(r.eigengap, ref.eigengap, 1e-9);
  }
}

TEST(Signatures, DistancesMatchFloydWarshall) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = fixtures::uniform_int(rng, 2, 14);
    Edges e;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (fixtures::uniform(rng, 0, 1) < 0.25) e.emplace_back(i, j);
      }
    }
    const LatentGraph g = LatentGraph::from_edges(n, e);
    const auto d = oracles::floyd_warshall(g);
    double wiener = 0;
    int diam = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (d[i][j] > 0) {
          wiener += d[i][j];
          diam = std::max(diam, d[i][j]);
        }
      }
    }
    const auto r = graph_signatures(g, static_cast<std::uint64_t>(trial));
    EXPECT_EQ(r.wiener_index, wiener);
    EXPECT_EQ(r.diameter, diam);
  }
}

TEST(Cycles, OnePerNonTreeEdge) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = fixtures::uniform_int(rng, 3, 16);
    Edges e;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (fixtures::uniform(rng, 0, 1) < 0.3) e.emplace_back(i, j);
      }
    }
    const LatentGraph g = LatentGraph::from_edges(n, e);
    int comps = 0;
    connected_components(g, &comps);
    const auto lengths = fundamental_cycle_lengths(g, static_cast<std::uint64_t>(trial));
    // Cyclomatic number m - n + c.
    EXPECT_EQ(lengths.size(), g.num_edges() - static_cast<std::size_t>(n) + static_cast<std::size_t>(comps));
    // Fundamental cycles are simple.
    for (int len : lengths) {
      EXPECT_GE(len, 3);
      EXPECT_LE(len, n);
    }
    EXPECT_EQ(fundamental_cycle_lengths(g, static_cast<std::uint64_t>(trial)), lengths);
  }
}

TEST(Cycles, CompleteGraphGivesTriangles) {
  Edges e;
  for (int i = 0; i < 5; ++i) {
    for (int j = i + 1; j < 5; ++j) e.emplace_back(i, j);
  }
  const auto lengths = fundamental_cycle_lengths(LatentGraph::from_edges(5, e), 11);
  EXPECT_EQ(lengths, std::vector<int>(6, 3));
}

TEST(Fiedler, PathClosedForm) {
  for (int n : {2, 3, 5, 10, 25}) {
    EXPECT_NEAR(fiedler_value(path(n)), 2.0 * (1.0 - std::cos(std::numbers::pi / n)), 1e-10);
  }
  const auto disconnected = graph_signatures(LatentGraph::from_edges(4, {{0, 1}, {2, 3}}), 0);
  EXPECT_EQ(disconnected.eigengap, 0.0);
  EXPECT_EQ(disconnected.n_components, 2);
}

TEST(Signatures, RowsInFixedOrder) {
  const auto rows = graph_signatures(path(4), 0).rows();
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].first, "cycle_length");
  EXPECT_FALSE(rows[0].second);
  EXPECT_EQ(rows[2].first, "wiener_index");
  EXPECT_EQ(*rows[2].second, 10.0);
}
