#include "config.hpp"

#include <fstream>
#include <set>

#include "latentkit/error.hpp"

namespace latentkit::cli {

namespace {

[[noreturn]] void config_error(const std::string& message) { fail(ErrorCode::ConfigError, message); }

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<T>();
}

std::optional<int> optional_int(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<int>();
}

MatchScheme parse_scheme(const std::string& s) {
  if (s == "hungarian") return MatchScheme::Hungarian;
  if (s == "injected") return MatchScheme::Injected;
  if (s == "spectral") return MatchScheme::Spectral;
  config_error("unknown match scheme '" + s + "'");
}

void parse_datasets(Config& cfg, const nlohmann::json& arr, const fs::path& base) {
  std::set<std::string> names;
  for (const auto& d : arr) {
    DatasetConfig ds;
    ds.name = d.at("name").get<std::string>();
    ds.label = get_or<std::string>(d, "label", "label");
    if (!names.insert(ds.name).second) config_error("duplicate dataset '" + ds.name + "'");
    std::set<std::string> models;
    for (const auto& [model, files] : d.at("models").items()) {
      ModelFiles mf;
      mf.name = model;
      if (files.is_string()) {
        mf.train = resolve(base, files.get<std::string>());
      } else {
        mf.train = resolve(base, files.at("train").get<std::string>());
        if (files.contains("test")) mf.test = resolve(base, files.at("test").get<std::string>());
      }
      ds.models.push_back(std::move(mf));
    }
    cfg.datasets.push_back(std::move(ds));
  }
}

}  // namespace

const ModelFiles* DatasetConfig::find(const std::string& model) const {
  for (const auto& m : models) {
    if (m.name == model) return &m;
  }
  return nullptr;
}

const DatasetConfig& Config::dataset(const std::string& name) const {
  for (const auto& d : datasets) {
    if (d.name == name) return d;
  }
  config_error("unknown dataset '" + name + "'");
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xF];
  return s;
}

std::uint64_t config_hash(const nlohmann::json& raw) {
  nlohmann::json j = raw;
  j.erase("jobs");
  j.erase("output_dir");
  return fnv1a(j.dump());
}

Config parse_config(nlohmann::json j, const fs::path& base, const Overrides& ov) {
  if (!j.is_object()) config_error("config must be a JSON object");
  if (ov.seed) j["seed"] = *ov.seed;
  if (ov.jobs) j["jobs"] = *ov.jobs;
  if (ov.format) j["format"] = *ov.format;
  if (ov.out) j["output_dir"] = ov.out->string();

  Config cfg;
  try {
    cfg.seed = get_or<std::uint64_t>(j, "seed", 0);
    cfg.jobs = get_or<int>(j, "jobs", 1);
    if (cfg.jobs < 1) config_error("jobs must be >= 1");
    cfg.output_dir = resolve(base, get_or<std::string>(j, "output_dir", "latentkit-out"));
    const auto format = get_or<std::string>(j, "format", "csv");
    if (format == "csv") {
      cfg.format = OutputFormat::Csv;
    } else if (format == "json") {
      cfg.format = OutputFormat::Json;
    } else {
      config_error("format must be csv or json, got '" + format + "'");
    }

    if (j.contains("datasets")) parse_datasets(cfg, j.at("datasets"), base);
    if (j.contains("pairs")) {
      for (const auto& p : j.at("pairs")) {
        if (!p.is_array() || p.size() != 2) config_error("each pair must be [source, target]");
        cfg.pairs.push_back({p[0].get<std::string>(), p[1].get<std::string>()});
      }
    }
    for (const auto& ds : cfg.datasets) {
      for (const auto& p : cfg.pairs) {
        if (!ds.find(p.source) || !ds.find(p.target)) {
          config_error("dataset '" + ds.name + "' lacks files for pair " + p.source + " -> " +
                       p.target);
        }
      }
    }
    if (j.contains("methods")) {
      cfg.methods.clear();
      for (const auto& m : j.at("methods")) {
        auto method = parse_align_method(m.get<std::string>());
        if (!method) config_error("unknown method '" + m.get<std::string>() + "'");
        cfg.methods.push_back(*method);
      }
    }
    if (j.contains("k_grid")) {
      cfg.k_grid = j.at("k_grid").get<std::vector<int>>();
      for (std::size_t i = 0; i < cfg.k_grid.size(); ++i) {
        if (cfg.k_grid[i] < 1) config_error("k_grid values must be positive");
        if (i > 0 && cfg.k_grid[i] <= cfg.k_grid[i - 1]) {
          config_error("k_grid must be strictly increasing");
        }
      }
    }
    const auto policy = get_or<std::string>(j, "pair_policy", "strict");
    if (policy == "strict") {
      cfg.pair_policy = PairPolicy::Strict;
    } else if (policy == "intersect") {
      cfg.pair_policy = PairPolicy::Intersect;
    } else {
      config_error("pair_policy must be strict or intersect");
    }
    cfg.epsilon = get_or<double>(j, "epsilon", kDefaultEpsilon);
    if (!(cfg.epsilon > 0.0)) config_error("epsilon must be positive");

    if (j.contains("ppfe")) {
      const auto& s = j.at("ppfe");
      if (s.contains("rho")) cfg.ppfe_rho = optional_int(s, "rho");
      cfg.ppfe_max_retries = get_or<int>(s, "max_retries", 3);
    }
    if (j.contains("probe")) cfg.probe_intercept = get_or<bool>(j.at("probe"), "intercept", true);
    if (j.contains("match")) {
      const auto& s = j.at("match");
      cfg.match_kappa = get_or<int>(s, "kappa", 10);
      cfg.match_rho = optional_int(s, "rho");
      if (cfg.match_rho && *cfg.match_rho < 1) config_error("match.rho must be positive");
      if (s.contains("schemes")) {
        cfg.match_schemes.clear();
        for (const auto& m : s.at("schemes")) cfg.match_schemes.push_back(parse_scheme(m.get<std::string>()));
      }
      if (cfg.match_kappa < 1) config_error("match.kappa must be positive");
    }
    if (j.contains("graph")) {
      const auto& s = j.at("graph");
      cfg.graph_k = get_or<int>(s, "k", 10);
      cfg.graph_max_points = get_or<int>(s, "max_points", 2000);
      if (cfg.graph_k < 1 || cfg.graph_max_points < 2) config_error("graph.k and graph.max_points must be positive");
    }
    if (j.contains("eval")) {
      cfg.eval_k = optional_int(j.at("eval"), "k");
      if (cfg.eval_k && *cfg.eval_k < 1) config_error("eval.k must be positive");
    }
    if (j.contains("ingest")) {
      const auto& s = j.at("ingest");
      for (const auto& p : s.at("inputs")) cfg.ingest_inputs.push_back(resolve(base, p.get<std::string>()));
      const auto fmt = get_or<std::string>(s, "output_format", "parquet");
      auto parsed = parse_table_format(fmt);
      if (!parsed) config_error("unknown output_format '" + fmt + "'");
      cfg.ingest_format = *parsed;
      const auto comp = get_or<std::string>(s, "compression", "gzip");
      if (comp == "gzip") {
        cfg.ingest_compression = ParquetCompression::Gzip;
      } else if (comp == "none") {
        cfg.ingest_compression = ParquetCompression::None;
      } else {
        config_error("compression must be gzip or none");
      }
    }
    if (j.contains("registry")) cfg.registry = resolve(base, j.at("registry").get<std::string>());
    if (j.contains("conditions")) {
      for (const auto& c : j.at("conditions")) cfg.conditions.push_back(ConditionSpec::from_json(c));
    } else {
      cfg.conditions = default_conditions();
    }
    if (j.contains("regress")) {
      const auto& s = j.at("regress");
      for (const auto& p : s.at("observations")) cfg.observations.push_back(resolve(base, p.get<std::string>()));
      const auto pooling = get_or<std::string>(s, "sigma_pooling", "metric");
      if (pooling == "metric") {
        cfg.sigma_pooling = SigmaPooling::Metric;
      } else if (pooling == "condition_metric") {
        cfg.sigma_pooling = SigmaPooling::ConditionMetric;
      } else {
        config_error("sigma_pooling must be metric or condition_metric");
      }
      if (s.contains("mnlogit")) {
        const auto& m = s.at("mnlogit");
        MnlogitSection sec;
        sec.dataset = m.at("dataset").get<std::string>();
        sec.outcome_field = get_or<std::string>(m, "outcome_field", "macro_family");
        sec.predictors = m.at("predictors").get<std::vector<std::string>>();
        sec.options.max_iter = get_or<int>(m, "max_iter", 100);
        sec.options.tol = get_or<double>(m, "tol", 1e-10);
        sec.options.standardize = get_or<bool>(m, "standardize", true);
        sec.options.intercept = get_or<bool>(m, "intercept", true);
        if (sec.predictors.empty()) config_error("regress.mnlogit.predictors is empty");
        cfg.mnlogit = std::move(sec);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    config_error(std::string("invalid config: ") + e.what());
  }
  cfg.raw = std::move(j);
  return cfg;
}

Config load_config(const fs::path& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    config_error("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(std::move(j), fs::absolute(path).parent_path(), overrides);
}

}  // namespace latentkit::cli
