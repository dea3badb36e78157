#pragma once

// Loader for tests/data/graph_corpus.json (networkx reference values).

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "latentkit/graphs.hpp"

namespace fixtures {

struct ReferenceGraph {
  latentkit::LatentGraph graph;
  std::vector<double> square_clustering;
  double wiener_index = 0.0;
  int diameter = 0;
  int n_components = 0;
  double eigengap = 0.0;
};

inline std::vector<ReferenceGraph> load_graph_corpus(const std::string& path) {
  std::ifstream in(path);
  const auto doc = nlohmann::json::parse(in);
  std::vector<ReferenceGraph> out;
  for (const auto& g : doc) {
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : g.at("edges")) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    ReferenceGraph r;
    r.graph = latentkit::LatentGraph::from_edges(g.at("n").get<int>(), edges);
    r.square_clustering = g.at("square_clustering").get<std::vector<double>>();
    r.wiener_index = g.at("wiener_index").get<double>();
    r.diameter = g.at("diameter").get<int>();
    r.n_components = g.at("n_components").get<int>();
    r.eigengap = g.at("eigengap").get<double>();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace fixtures
