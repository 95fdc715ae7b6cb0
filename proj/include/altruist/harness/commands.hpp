#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "altruist/harness/config.hpp"
#include "altruist/harness/experiments.hpp"

namespace altruist::harness {

inline const std::vector<std::string> kCommands{"train", "eval", "sweep", "adapt-matrix", "transfer", "classify", "plot"};

/// Runs one CLI command: creates a timestamped directory under `out_root`,
/// writes `resolved-config.json` there first, then the command's CSV (and SVG
/// when enabled) outputs. Returns the run directory.
std::filesystem::path run_command(const std::string& command, const ExperimentConfig& cfg,
                                  const std::filesystem::path& out_root, const ProgressFn& progress = {});

void save_checkpoint(const std::filesystem::path& path, const learn::Mlp<float>& net, std::int64_t steps,
                     const ExperimentConfig& cfg);
learn::Mlp<float> load_network(const std::filesystem::path& path);

/// Canonical text of the resolved configuration.
std::string resolved_config_text(const ExperimentConfig& cfg);

}  // namespace altruist::harness
