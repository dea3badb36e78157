#include "output.hpp"

#include <cmath>
#include <fstream>

#include <Eigen/Core>

#include "latentkit/error.hpp"
#include "latentkit/seeding.hpp"
#include "latentkit/text.hpp"

namespace latentkit::cli {

std::string num(double v) { return text::format_double(v); }

Cell num(const std::optional<double>& v) {
  if (!v) return std::nullopt;
  return text::format_double(*v);
}

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::InvalidArgument, "cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

void write_csv(const ResultTable& table, const fs::path& path) {
  auto out = open_out(path);
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out << (c ? "," : "") << text::csv_field(table.columns[c]);
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      if (row[c]) out << text::csv_field(*row[c]);
    }
    out << '\n';
  }
}

void write_json(const ResultTable& table, const fs::path& path) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < row.size(); ++c) {
      const bool numeric = c < table.numeric.size() && table.numeric[c];
      if (!row[c]) {
        obj[table.columns[c]] = nullptr;
      } else if (numeric) {
        auto v = text::parse_double(*row[c]);
        if (auto i = text::parse_int(*row[c])) {
          obj[table.columns[c]] = *i;
        } else if (v && std::isfinite(*v)) {
          obj[table.columns[c]] = *v;
        } else {
          obj[table.columns[c]] = *row[c];
        }
      } else {
        obj[table.columns[c]] = *row[c];
      }
    }
    arr.push_back(std::move(obj));
  }
  auto out = open_out(path);
  out << arr.dump(2) << '\n';
}

std::string write_table(const ResultTable& table, const fs::path& dir, const std::string& stem,
                        OutputFormat format) {
  const std::string name = stem + (format == OutputFormat::Csv ? ".csv" : ".json");
  if (format == OutputFormat::Csv) {
    write_csv(table, dir / name);
  } else {
    write_json(table, dir / name);
  }
  return name;
}

void run_pool(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  const auto count = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  if (count <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> threads;
  threads.reserve(count);
  for (std::size_t t = 0; t < count; ++t) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& th : threads) th.join();
}

std::size_t Manifest::failures() const {
  std::size_t n = 0;
  for (const auto& j : jobs) n += j.errors.empty() ? 0 : 1;
  return n;
}

std::uint64_t job_seed(const Config& cfg, const std::string& key) {
  return mix_seed(cfg.seed, fnv1a(key));
}

void write_manifest(const Manifest& m, const Config& cfg) {
  nlohmann::json j;
  j["command"] = m.command;
  j["config_hash"] = hex64(config_hash(cfg.raw));
  j["seed"] = cfg.seed;
  j["versions"] = {{"latentkit", LATENTKIT_VERSION},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                 std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
  nlohmann::json jobs = nlohmann::json::array();
  for (const auto& job : m.jobs) {
    jobs.push_back({{"key", job.key},
                    {"seed", job.seed},
                    {"status", job.errors.empty() ? "ok" : "failed"},
                    {"errors", job.errors}});
  }
  j["jobs"] = std::move(jobs);
  j["outputs"] = m.outputs;
  j["notes"] = m.notes;
  j["failed_jobs"] = m.failures();
  auto path = cfg.output_dir / (m.command + ".manifest.json");
  fs::create_directories(cfg.output_dir);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::InvalidArgument, "cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

}  // namespace latentkit::cli
