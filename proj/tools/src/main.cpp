#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "latentkit/error.hpp"

int main(int argc, char** argv) {
  using namespace latentkit;
  CLI::App app{"latentkit: latent space alignment and geometry toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  cli::Overrides ov;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string format;
  std::string out;

  std::vector<std::pair<CLI::App*, const cli::CommandInfo*>> subs;
  for (const auto& info : cli::commands()) {
    auto* sub = app.add_subcommand(info.name, info.help);
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Run seed (overrides config)");
    sub->add_option("--format", format, "Table format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", out, "Output directory (overrides config)");
    subs.emplace_back(sub, &info);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  for (const auto& [sub, info] : subs) {
    if (!sub->parsed()) continue;
    if (sub->count("--seed")) ov.seed = seed;
    if (sub->count("--jobs")) ov.jobs = jobs;
    if (sub->count("--format")) ov.format = format;
    if (sub->count("--out")) ov.out = std::filesystem::absolute(out);
    try {
      const auto cfg = cli::load_config(config_path, ov);
      return info->run(cfg);
    } catch (const Error& e) {
      std::fprintf(stderr, "%s\n", e.what());
      return e.code() == ErrorCode::ConfigError ? 2 : 1;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 1;
    }
  }
  return 2;
}
