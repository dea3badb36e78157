#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "cli_workspace.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "latentkit/error.hpp"
#include "latentkit/eval.hpp"

using namespace latentkit;
using namespace latentkit::cli;
using fixtures::CliWorkspace;

namespace {

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw std::runtime_error("no column " + name);
  }
};

// Outputs here never quote fields.
Csv read_csv(const fs::path& p) {
  std::istringstream in(fixtures::read_file(p));
  Csv out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (first) {
      out.header = std::move(cells);
      first = false;
    } else {
      out.rows.push_back(std::move(cells));
    }
  }
  return out;
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(LATENTKIT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) { return fs::temp_directory_path() / ("latentkit_test_cli_" + name); }

ErrorCode config_error_of(const nlohmann::json& j) {
  try {
    parse_config(j, fs::temp_directory_path(), {});
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Config, Validation) {
  EXPECT_EQ(config_error_of({{"k_grid", {4, 2}}}), ErrorCode::ConfigError);
  EXPECT_EQ(config_error_of({{"k_grid", {0, 2}}}), ErrorCode::ConfigError);
  EXPECT_EQ(config_error_of({{"methods", {"pca"}}}), ErrorCode::ConfigError);
  EXPECT_EQ(config_error_of({{"seed", "x"}}), ErrorCode::ConfigError);
  EXPECT_EQ(config_error_of({{"regress", {{"sigma_pooling", "dataset"}}}}), ErrorCode::ConfigError);
}

TEST(Config, OverridesAndHash) {
  const nlohmann::json j{{"seed", 3}, {"k_grid", {1, 2}}, {"output_dir", "a"}};
  const Config a = parse_config(j, "/base", {});
  EXPECT_EQ(a.seed, 3u);
  EXPECT_EQ(a.output_dir, fs::path("/base/a"));
  Overrides o;
  o.seed = 9;
  o.jobs = 4;
  o.out = "/elsewhere";
  const Config b = parse_config(j, "/base", o);
  EXPECT_EQ(b.seed, 9u);
  EXPECT_EQ(b.jobs, 4);
  EXPECT_NE(config_hash(a.raw), config_hash(b.raw));

  // Parallelism and output location do not change results, so not the hash.
  Overrides only_jobs;
  only_jobs.jobs = 8;
  only_jobs.out = "/tmp/x";
  EXPECT_EQ(config_hash(a.raw), config_hash(parse_config(j, "/base", only_jobs).raw));
}

TEST(Cli, AlignSweepShapeAndIdentityPair) {
  CliWorkspace ws(scratch("sweep"), 2, 8, 600, 200, 5);
  auto j = ws.base_config();
  j["pairs"] = nlohmann::json::array({nlohmann::json::array({ws.models[0], ws.models[1]}),
                                      nlohmann::json::array({ws.models[0], ws.models[0]})});
  j["k_grid"] = {1, 2, 4, 6, 8};
  const Config cfg = load_config(ws.write_config(j), {});
  ASSERT_EQ(cmd_align_sweep(cfg), 0);

  const Csv out = read_csv(cfg.output_dir / "align_sweep.csv");
  ASSERT_EQ(out.rows.size(), 30u);
  std::set<std::string> methods;
  for (const auto& r : out.rows) methods.insert(r[out.col("method")]);
  EXPECT_EQ(methods, (std::set<std::string>{"cca", "linear", "ppfe"}));

  // Native probe accuracy on the target's own test rows.
  const auto test = to_point_cloud(read_embedding_table(ws.dir / (ws.models[0] + "_test.csv")));
  const auto train = to_point_cloud(read_embedding_table(ws.dir / (ws.models[0] + "_train.csv")));
  const double native = probe_metrics(fit_probe(train, "label"), test, "label").accuracy;

  bool found = false;
  for (const auto& r : out.rows) {
    if (r[out.col("source")] == ws.models[0] && r[out.col("target")] == ws.models[0] &&
        r[out.col("method")] == "linear" && r[out.col("k")] == "8") {
      found = true;
      EXPECT_LT(std::stod(r[out.col("mse")]), 1e-10);
      EXPECT_NEAR(std::stod(r[out.col("accuracy")]), native, 1e-12);
      EXPECT_EQ(r[out.col("n_test")], "200");
    }
  }
  EXPECT_TRUE(found);

  const auto manifest = nlohmann::json::parse(fixtures::read_file(cfg.output_dir / "align-sweep.manifest.json"));
  EXPECT_EQ(manifest.at("command"), "align-sweep");
  EXPECT_EQ(manifest.at("jobs").size(), 6u);
  EXPECT_EQ(manifest.at("config_hash"), hex64(config_hash(cfg.raw)));
  EXPECT_EQ(manifest.at("failed_jobs"), 0);
}

TEST(Cli, AlignSweepDeterministic) {
  CliWorkspace ws(scratch("determinism"), 3, 6, 400, 120, 8);
  auto j = ws.base_config();
  j["k_grid"] = {2, 4, 6};
  const auto path = ws.write_config(j);
  std::string reference;
  for (const auto& [jobs, out] : std::vector<std::pair<int, std::string>>{{1, "o1"}, {3, "o3"}, {1, "o1b"}}) {
    Overrides o;
    o.jobs = jobs;
    o.out = ws.dir / out;
    ASSERT_EQ(cmd_align_sweep(load_config(path, o)), 0);
    const std::string text = fixtures::read_file(ws.dir / out / "align_sweep.csv");
    if (reference.empty()) {
      reference = text;
    } else {
      EXPECT_EQ(text, reference) << "jobs=" << jobs;
    }
  }
  // Default pairs: every ordered pair of distinct models, three methods each.
  EXPECT_EQ(read_csv(ws.dir / "o1" / "align_sweep.csv").rows.size(), 6u * 3u * 3u);
}

TEST(Cli, MetricsAndGraphSignatures) {
  CliWorkspace ws(scratch("metrics"), 4, 6, 300, 50, 2);
  const Config cfg = load_config(ws.write_config(ws.base_config()), {});
  ASSERT_EQ(cmd_metrics(cfg), 0);
  const Csv m = read_csv(cfg.output_dir / "metrics.csv");
  EXPECT_EQ(m.rows.size(), 40u);
  std::map<std::string, int> per_metric;
  for (const auto& r : m.rows) ++per_metric[r[m.col("metric")]];
  EXPECT_EQ(per_metric.size(), 10u);
  for (const auto& [name, count] : per_metric) EXPECT_EQ(count, 4) << name;

  ASSERT_EQ(cmd_graph_sig(cfg), 0);
  const Csv g = read_csv(cfg.output_dir / "graph_signatures.csv");
  EXPECT_EQ(g.rows.size(), 4u * 6u);
  for (const auto& r : g.rows) {
    EXPECT_EQ(r[g.col("built_with_k")], "10");
    EXPECT_EQ(r[g.col("n_points")], "300");
  }
}

TEST(Cli, MatchAndEval) {
  CliWorkspace ws(scratch("match"), 2, 6, 400, 100, 4);
  auto j = ws.base_config();
  j["k_grid"] = {3, 6};
  const Config cfg = load_config(ws.write_config(j), {});
  ASSERT_EQ(cmd_match(cfg), 0);
  const Csv m = read_csv(cfg.output_dir / "match.csv");
  std::set<std::string> schemes;
  for (const auto& r : m.rows) {
    schemes.insert(r[m.col("scheme")]);
    if (r[m.col("scheme")] == "spectral") {
      EXPECT_GE(std::stoi(r[m.col("k_est")]), 1);
      continue;
    }
    const double s = std::stod(r[m.col("mean_similarity")]);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
  }
  EXPECT_EQ(schemes, (std::set<std::string>{"hungarian", "injected", "spectral"}));
  EXPECT_TRUE(fs::exists(cfg.output_dir / "match_details.json"));

  ASSERT_EQ(cmd_eval(cfg), 0);
  const Csv e = read_csv(cfg.output_dir / "eval.csv");
  EXPECT_FALSE(e.rows.empty());
  EXPECT_TRUE(fs::exists(cfg.output_dir / "maps"));
}

TEST(Cli, IngestRoundTrip) {
  CliWorkspace ws(scratch("ingest"), 2, 4, 50, 10, 6);
  auto j = ws.base_config();
  j["ingest"] = {{"inputs", {ws.models[0] + "_train.csv", ws.models[1] + "_test.csv"}}};
  const Config cfg = load_config(ws.write_config(j), {});
  ASSERT_EQ(cmd_ingest(cfg), 0);
  const Csv summary = read_csv(cfg.output_dir / "ingest.csv");
  ASSERT_EQ(summary.rows.size(), 2u);
  for (const auto& r : summary.rows) {
    const auto original = read_embedding_table(ws.dir / r[summary.col("source")]);
    const auto copy = read_embedding_table(cfg.output_dir / r[summary.col("output")]);
    EXPECT_EQ(copy.ids(), original.ids());
    EXPECT_EQ(copy.embeddings(), original.embeddings());
    EXPECT_EQ(copy.labels(0), original.labels(0));
  }
}

TEST(Cli, RegressRecoversPlantedEffect) {
  const fs::path dir = scratch("regress");
  fs::remove_all(dir);
  std::ostringstream reg, obs;
  reg << "model_name,family,pretrain_dataset,num_parameters,latent_dim\n";
  obs << "dataset,model,metric,value\n";
  std::mt19937_64 rng(21);
  std::normal_distribution<double> nd;
  const char* families[] = {"cnn", "vit", "mlp"};
  for (int i = 0; i < 50; ++i) {
    const std::string fam = families[i % 3];
    const std::string base = fam + "_net" + std::to_string(i);
    reg << base << ".in1k," << fam << ",ImageNet-1K,1000,64\n";
    reg << base << ".in21k," << fam << ",ImageNet-21K,1000,64\n";
    for (int d = 0; d < 5; ++d) {
      const std::string ds = "ds" + std::to_string(d);
      obs << ds << "," << base << ".in1k,score," << nd(rng) << "\n";
      obs << ds << "," << base << ".in21k,score," << 1.0 + nd(rng) << "\n";
    }
  }
  fixtures::write_file(dir / "registry.csv", reg.str());
  fixtures::write_file(dir / "obs.csv", obs.str());
  const nlohmann::json j{{"seed", 1},
                         {"output_dir", "out"},
                         {"registry", "registry.csv"},
                         {"regress", {{"observations", {"obs.csv"}}}}};
  fixtures::write_file(dir / "config.json", j.dump());
  const Config cfg = load_config(dir / "config.json", {});
  ASSERT_EQ(cmd_regress(cfg), 0);

  const Csv f = read_csv(cfg.output_dir / "forest.csv");
  ASSERT_EQ(f.rows.size(), 1u);
  const auto& r = f.rows[0];
  EXPECT_EQ(r[f.col("condition")], "dataset_complexity");
  EXPECT_EQ(r[f.col("n_obs")], "500");
  EXPECT_EQ(r[f.col("n_pairs")], "50");
  const double beta = std::stod(r[f.col("standardized_beta")]);
  EXPECT_GE(beta, 0.8);
  EXPECT_LE(beta, 1.2);
  EXPECT_LT(std::stod(r[f.col("p")]), 0.05);
  EXPECT_LT(std::stod(r[f.col("ci_low")]), beta);

  // Conditions without pairs become manifest notes, not failures.
  const auto manifest = nlohmann::json::parse(fixtures::read_file(cfg.output_dir / "regress.manifest.json"));
  EXPECT_FALSE(manifest.at("notes").empty());
}

TEST(Cli, BinaryExitCodes) {
  CliWorkspace ws(scratch("binary"), 2, 4, 200, 40, 3);
  auto j = ws.base_config();
  j["k_grid"] = {2, 4};
  const auto good = ws.write_config(j);
  EXPECT_EQ(run_binary("metrics --config " + good.string()), 0);
  EXPECT_TRUE(fs::exists(ws.dir / "out" / "metrics.csv"));

  j["k_grid"] = {4, 2};
  const auto bad = ws.write_config(j, "bad.json");
  EXPECT_EQ(run_binary("align-sweep --config " + bad.string()), 2);
  EXPECT_EQ(run_binary("align-sweep --config " + (ws.dir / "missing.json").string()), 2);
  EXPECT_EQ(run_binary("no-such-command"), 2);
  EXPECT_EQ(run_binary("metrics"), 2);

  // A job that fails (k beyond the dimension) yields exit code 1.
  j["k_grid"] = {2, 9};
  j["methods"] = {"linear"};
  const auto partial = ws.write_config(j, "partial.json");
  EXPECT_EQ(run_binary("align-sweep --config " + partial.string() + " --format json"), 1);
  EXPECT_TRUE(fs::exists(ws.dir / "out" / "align_sweep.json"));
}
