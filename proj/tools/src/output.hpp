#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "config.hpp"

namespace latentkit::cli {

/// Cell text is already formatted; nullopt prints as an empty CSV field and
/// JSON null.
using Cell = std::optional<std::string>;

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  /// Numeric cells are emitted as JSON numbers.
  std::vector<bool> numeric;
};

std::string num(double v);
Cell num(const std::optional<double>& v);

void write_csv(const ResultTable& table, const fs::path& path);
void write_json(const ResultTable& table, const fs::path& path);
/// Writes `<stem>.csv` or `<stem>.json`; returns the file name.
std::string write_table(const ResultTable& table, const fs::path& dir, const std::string& stem,
                        OutputFormat format);

struct JobOutcome {
  std::string key;
  std::uint64_t seed = 0;
  std::vector<std::string> errors;  // one per failed unit of work
};

/// Calls fn(i) for i in [0, n) on `workers` threads. fn must not throw.
void run_pool(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

struct Manifest {
  std::string command;
  std::vector<JobOutcome> jobs;
  std::vector<std::string> outputs;
  std::vector<std::string> notes;

  std::size_t failures() const;
};

/// Writes manifest.json (sorted keys, no timestamps). Seeds, versions and
/// the config hash make it a provenance record.
void write_manifest(const Manifest& manifest, const Config& cfg);

/// Seed for one job: mixes the run seed with a hash of the job key.
std::uint64_t job_seed(const Config& cfg, const std::string& key);

}  // namespace latentkit::cli
