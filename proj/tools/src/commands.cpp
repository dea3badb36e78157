#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <tuple>

#include "latentkit/error.hpp"
#include "latentkit/eval.hpp"
#include "latentkit/geometry.hpp"
#include "latentkit/graphs.hpp"
#include "latentkit/registry.hpp"
#include "latentkit/seeding.hpp"
#include "latentkit/text.hpp"
#include "output.hpp"

namespace latentkit::cli {

namespace {

using Row = std::vector<Cell>;

struct JobResult {
  std::vector<Row> rows;
  std::vector<std::string> errors;
  nlohmann::json detail;
};

using JobFn = std::function<void(std::size_t, std::uint64_t, JobResult&)>;

std::string describe(const std::exception& e) {
  return e.what();
}

/// Runs one job per key on the worker pool. Keys must already be in output
/// order; rows are concatenated in that order so the result does not depend
/// on scheduling.
std::vector<JobResult> run_jobs(const Config& cfg, const std::vector<std::string>& keys,
                                Manifest& manifest, const JobFn& fn) {
  std::vector<JobResult> results(keys.size());
  std::vector<std::uint64_t> seeds(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) seeds[i] = job_seed(cfg, keys[i]);
  run_pool(keys.size(), cfg.jobs, [&](std::size_t i) {
    try {
      fn(i, seeds[i], results[i]);
    } catch (const std::exception& e) {
      results[i].errors.push_back(describe(e));
    }
  });
  for (std::size_t i = 0; i < keys.size(); ++i) {
    manifest.jobs.push_back({keys[i], seeds[i], results[i].errors});
  }
  return results;
}

ResultTable gather(std::vector<std::string> columns, std::vector<bool> numeric,
                   std::vector<JobResult>& results) {
  ResultTable t{std::move(columns), {}, std::move(numeric)};
  for (auto& r : results) {
    for (auto& row : r.rows) t.rows.push_back(std::move(row));
  }
  return t;
}

int finish(const Config& cfg, Manifest& manifest) {
  write_manifest(manifest, cfg);
  for (const auto& job : manifest.jobs) {
    for (const auto& e : job.errors) std::fprintf(stderr, "job %s failed: %s\n", job.key.c_str(), e.c_str());
  }
  return manifest.failures() == 0 ? 0 : 1;
}

PointCloud load_cloud(const fs::path& path) { return to_point_cloud(read_embedding_table(path)); }

void require(bool ok, const std::string& message) {
  if (!ok) fail(ErrorCode::ConfigError, message);
}

struct PairJob {
  const DatasetConfig* ds;
  ModelPair pair;
};

std::vector<PairJob> pair_jobs(const Config& cfg) {
  require(!cfg.datasets.empty(), "config has no datasets");
  std::vector<PairJob> jobs;
  for (const auto& ds : cfg.datasets) {
    if (!cfg.pairs.empty()) {
      for (const auto& p : cfg.pairs) jobs.push_back({&ds, p});
      continue;
    }
    // No explicit pairs: every ordered pair of distinct models.
    for (const auto& a : ds.models) {
      for (const auto& b : ds.models) {
        if (a.name != b.name) jobs.push_back({&ds, {a.name, b.name}});
      }
    }
  }
  require(!jobs.empty(), "no model pairs to run");
  std::sort(jobs.begin(), jobs.end(), [](const PairJob& a, const PairJob& b) {
    return std::tie(a.ds->name, a.pair.source, a.pair.target) <
           std::tie(b.ds->name, b.pair.source, b.pair.target);
  });
  return jobs;
}

std::string pair_key(const PairJob& j) {
  return j.ds->name + "/" + j.pair.source + "->" + j.pair.target;
}

struct LoadedPair {
  PairedClouds train;
  PairedClouds test;
};

LoadedPair load_pair(const Config& cfg, const PairJob& job, bool need_test) {
  const auto* a = job.ds->find(job.pair.source);
  const auto* b = job.ds->find(job.pair.target);
  LoadedPair out;
  out.train = pair_by_id(load_cloud(a->train), load_cloud(b->train), cfg.pair_policy);
  if (need_test) {
    if (!a->test || !b->test) {
      fail(ErrorCode::ConfigError, "test split missing for " + job.pair.source + " or " + job.pair.target);
    }
    out.test = pair_by_id(load_cloud(*a->test), load_cloud(*b->test), cfg.pair_policy);
  }
  return out;
}

std::vector<AlignMethod> sorted_methods(std::vector<AlignMethod> methods) {
  std::sort(methods.begin(), methods.end(),
            [](AlignMethod a, AlignMethod b) { return to_string(a) < to_string(b); });
  methods.erase(std::unique(methods.begin(), methods.end()), methods.end());
  return methods;
}

/// Fits one map per k in `ks`, calling emit(k, map) for each. Linear and CCA
/// decompose once and truncate; PPFE refits per k (kappa = k). Failures are
/// per k and do not stop the remaining values.
void fit_grid(const Config& cfg, const PairedClouds& train, AlignMethod method,
              const std::vector<int>& ks, std::uint64_t seed, JobResult& res,
              const std::function<void(int, const AlignmentMap&)>& emit) {
  std::optional<AlignmentMap> base;
  if (method == AlignMethod::Linear) base = fit_linear(train, cfg.epsilon);
  for (int k : ks) {
    try {
      AlignmentMap m;
      switch (method) {
        case AlignMethod::Linear:
          m = truncate_linear(*base, k);
          break;
        case AlignMethod::Cca:
          if (!base) {
            base = fit_cca(train, k, cfg.epsilon);
            m = *base;
          } else {
            m = truncate_cca(*base, k);
          }
          break;
        case AlignMethod::Ppfe: {
          PpfeOptions opts;
          opts.rho = cfg.ppfe_rho;
          opts.seed = mix_seed(seed, static_cast<std::uint64_t>(k));
          opts.epsilon = cfg.epsilon;
          opts.max_retries = cfg.ppfe_max_retries;
          m = fit_ppfe(train, k, opts);
          break;
        }
      }
      emit(k, m);
    } catch (const std::exception& e) {
      res.errors.push_back("k=" + std::to_string(k) + ": " + describe(e));
    }
  }
}

std::string table_extension(TableFormat f) {
  switch (f) {
    case TableFormat::Parquet: return ".parquet";
    case TableFormat::Csv: return ".csv";
    case TableFormat::Jsonl: return ".jsonl";
  }
  return {};
}

std::string safe_name(std::string s) {
  for (char& c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-')) c = '_';
  }
  return s;
}

struct ModelJob {
  const DatasetConfig* ds;
  const ModelFiles* model;
};

std::vector<ModelJob> model_jobs(const Config& cfg) {
  require(!cfg.datasets.empty(), "config has no datasets");
  std::vector<ModelJob> jobs;
  for (const auto& ds : cfg.datasets) {
    for (const auto& m : ds.models) jobs.push_back({&ds, &m});
  }
  std::sort(jobs.begin(), jobs.end(), [](const ModelJob& a, const ModelJob& b) {
    return std::tie(a.ds->name, a.model->name) < std::tie(b.ds->name, b.model->name);
  });
  return jobs;
}

ModelRegistry require_registry(const Config& cfg) {
  require(cfg.registry.has_value(), "config has no registry");
  return load_registry(*cfg.registry);
}

}  // namespace

// ---------------------------------------------------------------- ingest

int cmd_ingest(const Config& cfg) {
  require(!cfg.ingest_inputs.empty(), "ingest.inputs is empty");
  std::optional<ModelRegistry> registry;
  if (cfg.registry) registry = load_registry(*cfg.registry);

  std::vector<fs::path> inputs = cfg.ingest_inputs;
  std::sort(inputs.begin(), inputs.end());
  std::vector<std::string> keys;
  for (const auto& p : inputs) keys.push_back(p.string());

  Manifest manifest{"ingest", {}, {}, {}};
  const fs::path table_dir = cfg.output_dir / "tables";
  fs::create_directories(table_dir);
  auto results = run_jobs(cfg, keys, manifest, [&](std::size_t i, std::uint64_t, JobResult& res) {
    const auto& src = inputs[i];
    auto table = read_embedding_table(src);
    if (registry) {
      if (auto issue = validate_against_registry(table, *registry)) {
        res.errors.push_back(issue->message);
        return;
      }
    }
    const auto out = table_dir / (src.stem().string() + table_extension(cfg.ingest_format));
    write_embedding_table(table, out, cfg.ingest_format, cfg.ingest_compression);
    std::string labels;
    for (const auto& c : table.label_columns()) labels += (labels.empty() ? "" : ";") + c;
    res.rows.push_back({src.filename().string(), ("tables" / out.filename()).string(), table.model_name(),
                        std::to_string(table.size()), std::to_string(table.dim()), labels});
  });
  auto table = gather({"source", "output", "model_name", "rows", "dim", "label_columns"},
                      {false, false, false, true, true, false}, results);
  manifest.outputs.push_back(write_table(table, cfg.output_dir, "ingest", cfg.format));
  return finish(cfg, manifest);
}

// ---------------------------------------------------------------- align-sweep

int cmd_align_sweep(const Config& cfg) {
  require(!cfg.k_grid.empty(), "k_grid is empty");
  const auto methods = sorted_methods(cfg.methods);
  struct Job {
    PairJob pair;
    AlignMethod method;
  };
  std::vector<Job> jobs;
  std::vector<std::string> keys;
  for (const auto& pj : pair_jobs(cfg)) {
    for (auto m : methods) {
      jobs.push_back({pj, m});
      keys.push_back(pair_key(pj) + "/" + std::string(to_string(m)));
    }
  }

  Manifest manifest{"align-sweep", {}, {}, {}};
  auto results = run_jobs(cfg, keys, manifest, [&](std::size_t i, std::uint64_t seed, JobResult& res) {
    const auto& job = jobs[i];
    const auto& label = job.pair.ds->label;
    auto data = load_pair(cfg, job.pair, true);
    const auto probe = fit_probe(data.train.B, label, cfg.probe_intercept);
    fit_grid(cfg, data.train, job.method, cfg.k_grid, seed, res, [&](int k, const AlignmentMap& m) {
      const auto r = evaluate_alignment(m, data.test, probe, label);
      res.rows.push_back({job.pair.ds->name, job.pair.pair.source, job.pair.pair.target,
                          std::string(to_string(job.method)), std::to_string(k), num(r.mse),
                          num(r.accuracy), num(r.precision_macro), num(r.recall_macro),
                          num(r.f1_macro), std::to_string(r.n_test)});
    });
  });
  auto table = gather({"dataset", "source", "target", "method", "k", "mse", "accuracy",
                       "precision", "recall", "f1", "n_test"},
                      {false, false, false, false, true, true, true, true, true, true, true}, results);
  manifest.outputs.push_back(write_table(table, cfg.output_dir, "align_sweep", cfg.format));
  return finish(cfg, manifest);
}

// ---------------------------------------------------------------- eval

int cmd_eval(const Config& cfg) {
  require(cfg.eval_k || !cfg.k_grid.empty(), "eval needs eval.k or a k_grid");
  const int k = cfg.eval_k ? *cfg.eval_k : cfg.k_grid.back();
  const auto methods = sorted_methods(cfg.methods);
  const auto pjobs = pair_jobs(cfg);
  std::vector<std::string> keys;
  for (const auto& pj : pjobs) keys.push_back(pair_key(pj));

  Manifest manifest{"eval", {}, {}, {}};
  const fs::path map_dir = cfg.output_dir / "maps";
  auto results = run_jobs(cfg, keys, manifest, [&](std::size_t i, std::uint64_t seed, JobResult& res) {
    const auto& pj = pjobs[i];
    const auto& label = pj.ds->label;
    auto data = load_pair(cfg, pj, true);
    const auto probe = fit_probe(data.train.B, label, cfg.probe_intercept);
    const auto& truth = data.test.B.label(label);

    auto emit_rows = [&](const std::string& method, std::optional<int> kk,
                         const std::vector<std::int64_t>& predicted) {
      for (const auto& c : per_class_scores(truth, predicted)) {
        res.rows.push_back({pj.ds->name, pj.pair.source, pj.pair.target, method,
                            kk ? Cell(std::to_string(*kk)) : std::nullopt, std::to_string(c.label),
                            num(c.precision), num(c.recall), num(c.f1), std::to_string(c.support)});
      }
    };
    // Probe on the target's own test embeddings: the ceiling for transmitted rows.
    emit_rows("native", std::nullopt, probe.predict(data.test.B.X));
    for (auto method : methods) {
      fit_grid(cfg, data.train, method, {k}, mix_seed(seed, static_cast<std::uint64_t>(method)), res,
               [&](int kk, const AlignmentMap& m) {
                 emit_rows(std::string(to_string(method)), kk, probe.predict(transmit(m, data.test.A.X)));
                 const auto name = safe_name(pj.ds->name + "__" + pj.pair.source + "__" +
                                             pj.pair.target + "__" + std::string(to_string(method)) +
                                             "_k" + std::to_string(kk)) + ".json";
                 fs::create_directories(map_dir);
                 std::ofstream(map_dir / name, std::ios::binary | std::ios::trunc)
                     << m.to_json().dump(2) << '\n';
               });
    }
  });
  auto table = gather({"dataset", "source", "target", "method", "k", "class", "precision", "recall",
                       "f1", "support"},
                      {false, false, false, false, true, true, true, true, true, true}, results);
  manifest.outputs.push_back(write_table(table, cfg.output_dir, "eval", cfg.format));
  manifest.outputs.push_back("maps/");
  return finish(cfg, manifest);
}

// ---------------------------------------------------------------- match

int cmd_match(const Config& cfg) {
  const auto pjobs = pair_jobs(cfg);
  std::vector<std::string> keys;
  for (const auto& pj : pjobs) keys.push_back(pair_key(pj));
  auto schemes = cfg.match_schemes;
  std::sort(schemes.begin(), schemes.end(),
            [](MatchScheme a, MatchScheme b) { return to_string(a) < to_string(b); });
  schemes.erase(std::unique(schemes.begin(), schemes.end()), schemes.end());

  Manifest manifest{"match", {}, {}, {}};
  auto results = run_jobs(cfg, keys, manifest, [&](std::size_t i, std::uint64_t seed, JobResult& res) {
    const auto& pj = pjobs[i];
    auto data = load_pair(cfg, pj, false);
    AnchorOptions opts;
    opts.rho = cfg.match_rho;
    opts.seed = mix_seed(seed, 0);
    const auto pa = prototypical_anchors(data.train.A.X, cfg.match_kappa, opts);
    opts.seed = mix_seed(seed, 1);
    const auto pb = prototypical_anchors(data.train.B.X, cfg.match_kappa, opts);
    const Matrix J = jaccard_matrix(pa.assignment, pb.assignment);
    res.detail = nlohmann::json::object();
    for (auto scheme : schemes) {
      Matching m;
      switch (scheme) {
        case MatchScheme::Hungarian: m = hungarian_match(J); break;
        case MatchScheme::Injected: m = injected_match(pa.assignment); break;
        case MatchScheme::Spectral: m = spectral_match(J, mix_seed(seed, 2)); break;
      }
      const bool spectral = scheme == MatchScheme::Spectral;
      const auto matched = spectral ? m.groups.size() : (m.pairs.empty() ? m.groups.size() : m.pairs.size());
      res.rows.push_back({pj.ds->name, pj.pair.source, pj.pair.target, std::string(to_string(scheme)),
                          std::to_string(cfg.match_kappa),
                          spectral ? std::nullopt : Cell(num(m.mean_similarity)),
                          std::to_string(matched),
                          spectral ? Cell(std::to_string(m.k_est)) : std::nullopt});
      res.detail[std::string(to_string(scheme))] = m.to_json();
    }
  });

  auto table = gather({"dataset", "source", "target", "scheme", "kappa", "mean_similarity",
                       "n_groups", "k_est"},
                      {false, false, false, false, true, true, true, true}, results);
  manifest.outputs.push_back(write_table(table, cfg.output_dir, "match", cfg.format));
  nlohmann::json detail = nlohmann::json::object();
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (!results[i].detail.is_null()) detail[keys[i]] = results[i].detail;
  }
  fs::create_directories(cfg.output_dir);
  std::ofstream(cfg.output_dir / "match_details.json", std::ios::binary | std::ios::trunc)
      << detail.dump(2) << '\n';
  manifest.outputs.push_back("match_details.json");
  return finish(cfg, manifest);
}

// ---------------------------------------------------------------- metrics

int cmd_metrics(const Config& cfg) {
  const auto jobs = model_jobs(cfg);
  std::vector<std::string> keys;
  for (const auto& j : jobs) keys.push_back(j.ds->name + "/" + j.model->name);

  Manifest manifest{"metrics", {}, {}, {}};
  auto results = run_jobs(cfg, keys, manifest, [&](std::size_t i, std::uint64_t, JobResult& res) {
    const auto cloud = load_cloud(jobs[i].model->train);
    const auto report = geometry_metrics(cloud.X);
    for (const auto& [name, value] : report.rows()) {
      res.rows.push_back({jobs[i].ds->name, jobs[i].model->name, name, num(value)});
    }
  });
  auto table = gather({"dataset", "model", "metric", "value"}, {false, false, false, true}, results);
  manifest.outputs.push_back(write_table(table, cfg.output_dir, "metrics", cfg.format));
  return finish(cfg, manifest);
}

// ---------------------------------------------------------------- graph-sig

int cmd_graph_sig(const Config& cfg) {
  const auto jobs = model_jobs(cfg);
  std::vector<std::string> keys;
  for (const auto& j : jobs) keys.push_back(j.ds->name + "/" + j.model->name);

  Manifest manifest{"graph-sig", {}, {}, {}};
  auto results = run_jobs(cfg, keys, manifest, [&](std::size_t i, std::uint64_t seed, JobResult& res) {
    auto cloud = load_cloud(jobs[i].model->train);
    Matrix X = std::move(cloud.X);
    if (X.rows() > cfg.graph_max_points) {
      // Seeded partial Fisher-Yates; the kept rows stay in their original order.
      std::vector<Eigen::Index> idx(static_cast<std::size_t>(X.rows()));
      std::iota(idx.begin(), idx.end(), Eigen::Index{0});
      std::mt19937_64 rng(mix_seed(seed, 0));
      const auto m = static_cast<std::size_t>(cfg.graph_max_points);
      for (std::size_t a = 0; a < m; ++a) {
        const auto span = static_cast<std::uint64_t>(idx.size() - a);
        std::swap(idx[a], idx[a + static_cast<std::size_t>(rng() % span)]);
      }
      idx.resize(m);
      std::sort(idx.begin(), idx.end());
      Matrix sub(static_cast<Eigen::Index>(m), X.cols());
      for (std::size_t r = 0; r < m; ++r) sub.row(static_cast<Eigen::Index>(r)) = X.row(idx[r]);
      X = std::move(sub);
    }
    const auto g = knn_graph(X, cfg.graph_k);
    const auto report = graph_signatures(g, mix_seed(seed, 1));
    for (const auto& [name, value] : report.rows()) {
      res.rows.push_back({jobs[i].ds->name, jobs[i].model->name, std::to_string(g.built_with_k),
                          std::to_string(X.rows()), name, num(value)});
    }
  });
  auto table = gather({"dataset", "model", "built_with_k", "n_points", "signature", "value"},
                      {false, false, true, true, false, true}, results);
  manifest.outputs.push_back(write_table(table, cfg.output_dir, "graph_signatures", cfg.format));
  return finish(cfg, manifest);
}

// ---------------------------------------------------------------- pairs

namespace {

std::vector<MatchedPair> all_pairs(const Config& cfg, const ModelRegistry& registry,
                                   Manifest& manifest) {
  require(!cfg.conditions.empty(), "no conditions configured");
  std::vector<MatchedPair> pairs;
  for (const auto& spec : cfg.conditions) {
    try {
      auto p = build_pairs(registry, spec);
      pairs.insert(pairs.end(), p.begin(), p.end());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoPairsFound) throw;
      manifest.notes.push_back("condition " + spec.name + ": no pairs found");
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const MatchedPair& a, const MatchedPair& b) {
    return std::tie(a.condition, a.control, a.treatment) < std::tie(b.condition, b.control, b.treatment);
  });
  return pairs;
}

}  // namespace

int cmd_pairs(const Config& cfg) {
  const auto registry = require_registry(cfg);
  Manifest manifest{"pairs", {}, {}, {}};
  const auto pairs = all_pairs(cfg, registry, manifest);
  ResultTable table{{"condition", "control", "treatment", "family"}, {}, {}};
  for (const auto& p : pairs) table.rows.push_back({p.condition, p.control, p.treatment, p.family});
  manifest.outputs.push_back(write_table(table, cfg.output_dir, "pairs", cfg.format));
  return finish(cfg, manifest);
}

// ---------------------------------------------------------------- regress

namespace {

/// Long-format CSV: dataset, model (or model_name), metric (or signature),
/// value. Empty values are skipped.
std::vector<MetricObservation> read_observations(const fs::path& path) {
  text::CsvReader reader(path);
  const auto header = text::read_header(reader);
  auto col = [&](std::initializer_list<const char*> names) {
    for (const char* n : names) {
      if (auto c = header.find(n)) return *c;
    }
    fail(ErrorCode::MissingColumn, path.string() + ": missing column '" + *names.begin() + "'");
  };
  const auto c_ds = col({"dataset"});
  const auto c_model = col({"model", "model_name"});
  const auto c_metric = col({"metric", "signature"});
  const auto c_value = col({"value"});
  std::vector<MetricObservation> out;
  std::vector<std::string> f;
  while (reader.next(f)) {
    if (f.size() != header.names.size()) {
      fail(ErrorCode::MalformedFile, path.string() + ":" + std::to_string(reader.line()) + ": wrong field count");
    }
    if (is_missing_text(text::trim(f[c_value]))) continue;
    auto v = text::parse_double(f[c_value]);
    if (!v) fail(ErrorCode::MalformedFile, path.string() + ":" + std::to_string(reader.line()) + ": bad value");
    out.push_back({f[c_model], f[c_ds], f[c_metric], *v});
  }
  return out;
}

}  // namespace

int cmd_regress(const Config& cfg) {
  require(!cfg.observations.empty(), "regress.observations is empty");
  const auto registry = require_registry(cfg);
  Manifest manifest{"regress", {}, {}, {}};

  std::vector<MetricObservation> obs;
  for (const auto& p : cfg.observations) {
    auto part = read_observations(p);
    obs.insert(obs.end(), part.begin(), part.end());
  }
  const auto pairs = all_pairs(cfg, registry, manifest);
  const auto tasks = build_regression_tasks(obs, pairs);

  std::vector<std::string> keys;
  for (const auto& t : tasks) keys.push_back(t.condition + "/" + t.metric);
  auto results = run_jobs(cfg, keys, manifest, [&](std::size_t i, std::uint64_t, JobResult& res) {
    const auto& task = tasks[i];
    const auto e = estimate_effect(task, pooled_control_sd(tasks, task, cfg.sigma_pooling));
    res.rows.push_back({e.condition, e.metric, num(e.standardized_beta), num(e.ci_low), num(e.ci_high),
                        num(e.p_value), num(e.beta), num(e.se_hc3), num(e.sigma_control),
                        std::to_string(e.n_obs), std::to_string(e.n_pairs)});
  });
  auto forest = gather({"condition", "metric", "standardized_beta", "ci_low", "ci_high", "p",
                        "beta", "se_hc3", "sigma_control", "n_obs", "n_pairs"},
                       {false, false, true, true, true, true, true, true, true, true, true}, results);
  manifest.outputs.push_back(write_table(forest, cfg.output_dir, "forest", cfg.format));

  if (cfg.mnlogit) {
    const auto& sec = *cfg.mnlogit;
    std::vector<std::string> mkeys{"mnlogit/" + sec.dataset};
    auto mres = run_jobs(cfg, mkeys, manifest, [&](std::size_t, std::uint64_t, JobResult& res) {
      std::map<std::pair<std::string, std::string>, double> value;  // (model, metric)
      for (const auto& o : obs) {
        if (o.dataset == sec.dataset) value[{o.model_name, o.metric}] = o.value;
      }
      std::vector<std::string> outcome;
      std::vector<std::vector<double>> rows;
      std::size_t skipped = 0;
      for (const auto& entry : registry.entries()) {
        auto y = entry.field(sec.outcome_field);
        if (!y) continue;
        std::vector<double> row;
        for (const auto& p : sec.predictors) {
          std::optional<double> v;
          if (p == "latent_dim" && entry.latent_dim) {
            v = static_cast<double>(*entry.latent_dim);
          } else if (p == "num_parameters" && entry.num_parameters) {
            v = static_cast<double>(*entry.num_parameters);
          } else if (auto it = value.find({entry.model_name, p}); it != value.end()) {
            v = it->second;
          }
          if (!v) break;
          row.push_back(*v);
        }
        if (row.size() != sec.predictors.size()) {
          ++skipped;
          continue;
        }
        outcome.push_back(*y);
        rows.push_back(std::move(row));
      }
      std::vector<std::string> levels(outcome.begin(), outcome.end());
      std::sort(levels.begin(), levels.end());
      levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
      std::vector<std::int64_t> y;
      for (const auto& o : outcome) {
        y.push_back(std::lower_bound(levels.begin(), levels.end(), o) - levels.begin());
      }
      Matrix X(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(sec.predictors.size()));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
          X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
      }
      for (const auto& t : drop_one_lr_tests(X, y, sec.predictors, sec.options)) {
        res.rows.push_back({t.variable, num(t.lr_stat), std::to_string(t.df), num(t.p_value),
                            std::to_string(rows.size()), std::to_string(levels.size())});
      }
      res.detail = {{"n_models", rows.size()}, {"skipped_incomplete", skipped}, {"classes", levels}};
    });
    if (!mres[0].detail.is_null()) {
      manifest.notes.push_back("mnlogit: " + mres[0].detail.dump());
    }
    auto lr = gather({"variable", "lr_stat", "df", "p_value", "n_models", "n_classes"},
                     {false, true, true, true, true, true}, mres);
    manifest.outputs.push_back(write_table(lr, cfg.output_dir, "lr_tests", cfg.format));
  }
  return finish(cfg, manifest);
}

const std::vector<CommandInfo>& commands() {
  static const std::vector<CommandInfo> list{
      {"ingest", "Validate embedding tables and rewrite them in the configured format", cmd_ingest},
      {"align-sweep", "Fit and score every (pair, method, k) on the test split", cmd_align_sweep},
      {"eval", "Per-class probe scores and saved maps at one k", cmd_eval},
      {"match", "Prototype clustering and cross-model concept matching", cmd_match},
      {"metrics", "Geometry metrics per model", cmd_metrics},
      {"graph-sig", "kNN graph signatures per model", cmd_graph_sig},
      {"pairs", "Matched control/treatment pairs from the registry", cmd_pairs},
      {"regress", "Treatment-effect regressions and multinomial LR tests", cmd_regress},
  };
  return list;
}

}  // namespace latentkit::cli
