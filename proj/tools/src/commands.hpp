#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace latentkit::cli {

/// Each command writes its tables and a manifest under cfg.output_dir and
/// returns the process exit code: 0 when every job succeeded, 1 otherwise.
/// Config problems throw Error(ConfigError).
int cmd_ingest(const Config& cfg);
int cmd_align_sweep(const Config& cfg);
int cmd_eval(const Config& cfg);
int cmd_match(const Config& cfg);
int cmd_metrics(const Config& cfg);
int cmd_graph_sig(const Config& cfg);
int cmd_pairs(const Config& cfg);
int cmd_regress(const Config& cfg);

struct CommandInfo {
  const char* name;
  const char* help;
  int (*run)(const Config&);
};
const std::vector<CommandInfo>& commands();

}  // namespace latentkit::cli
