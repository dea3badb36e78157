#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "latentkit/align.hpp"
#include "latentkit/concepts.hpp"
#include "latentkit/pairing.hpp"
#include "latentkit/stats.hpp"
#include "latentkit/table.hpp"
#include "latentkit/table_io.hpp"

namespace latentkit::cli {

namespace fs = std::filesystem;

struct ModelFiles {
  std::string name;
  fs::path train;
  std::optional<fs::path> test;
};

struct DatasetConfig {
  std::string name;
  std::string label = "label";
  std::vector<ModelFiles> models;

  const ModelFiles* find(const std::string& model) const;
};

struct ModelPair {
  std::string source;
  std::string target;
};

enum class OutputFormat { Csv, Json };

struct MnlogitSection {
  std::string dataset;
  std::string outcome_field = "macro_family";
  std::vector<std::string> predictors;
  MnlogitOptions options;
};

struct Config {
  /// Canonical JSON after flag overrides; hashed for manifests.
  nlohmann::json raw;
  std::uint64_t seed = 0;
  int jobs = 1;
  fs::path output_dir = "latentkit-out";
  OutputFormat format = OutputFormat::Csv;

  std::vector<DatasetConfig> datasets;
  std::vector<ModelPair> pairs;
  std::vector<AlignMethod> methods{AlignMethod::Ppfe, AlignMethod::Linear, AlignMethod::Cca};
  std::vector<int> k_grid;
  PairPolicy pair_policy = PairPolicy::Strict;
  double epsilon = kDefaultEpsilon;

  std::optional<int> ppfe_rho = kDefaultPpfeRho;
  int ppfe_max_retries = 3;
  bool probe_intercept = true;

  int match_kappa = 10;
  std::optional<int> match_rho;
  std::vector<MatchScheme> match_schemes{MatchScheme::Hungarian, MatchScheme::Injected,
                                         MatchScheme::Spectral};

  int graph_k = 10;
  int graph_max_points = 2000;

  std::optional<int> eval_k;  // nullopt: largest k in k_grid

  std::vector<fs::path> ingest_inputs;
  TableFormat ingest_format = TableFormat::Parquet;
  ParquetCompression ingest_compression = ParquetCompression::Gzip;

  std::optional<fs::path> registry;
  std::vector<ConditionSpec> conditions;

  std::vector<fs::path> observations;
  SigmaPooling sigma_pooling = SigmaPooling::Metric;
  std::optional<MnlogitSection> mnlogit;

  const DatasetConfig& dataset(const std::string& name) const;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> format;
  std::optional<fs::path> out;
};

/// Parses and validates; relative paths resolve against the config file's
/// directory. Throws Error(ConfigError).
Config load_config(const fs::path& path, const Overrides& overrides);
Config parse_config(nlohmann::json j, const fs::path& base_dir, const Overrides& overrides);

/// FNV-1a over the canonical dump, without fields that cannot change results
/// (jobs, output_dir).
std::uint64_t config_hash(const nlohmann::json& raw);
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace latentkit::cli
