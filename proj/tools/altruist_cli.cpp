#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "altruist/harness/commands.hpp"

namespace h = altruist::harness;

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent altruistic driving: training, evaluation and analysis"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "runs";
  std::optional<int> workers;
  bool quiet = false;
  app.add_option("--config", config_path, "JSON config; missing keys take their defaults")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "base seed");
  app.add_option("--out-dir", out_dir, "root of the timestamped run directories");
  app.add_option("--workers", workers, "parallel evaluation workers")->check(CLI::PositiveNumber);
  app.add_flag("-q,--quiet", quiet, "no progress output");

  // Per-command overrides, all of which land in the resolved config.
  std::optional<int> episodes, eval_episodes, points, vehicle, grid_points;
  std::optional<double> phi, safe_th;
  std::optional<std::string> scenario, population, checkpoint, policy, mode, egoistic, synthetic, checkpoint_dir, log,
      input;
  std::vector<std::string> rows, cols;

  auto* train = app.add_subcommand("train", "train a policy on the configured domain");
  train->add_option("--episodes", episodes, "training episodes");
  train->add_option("--phi", phi, "SVO angle of the AVs (rad)");
  train->add_option("--scenario", scenario, "merge | exit | drive");
  train->add_option("--population", population, "aggressive | moderate | conservative | mixed");

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint or a baseline policy");
  eval->add_option("--checkpoint", checkpoint, "network checkpoint");
  eval->add_option("--policy", policy, "network | random | idle");
  eval->add_option("--episodes", eval_episodes, "evaluation episodes");
  eval->add_option("--scenario", scenario, "merge | exit");
  eval->add_option("--population", population, "aggressive | moderate | conservative | mixed");
  eval->add_option("--safe-th", safe_th, "safety threshold (s), 0 disables the mask");

  auto* sweep = app.add_subcommand("sweep", "sensitivity sweep over HV aggressiveness, or SVO angle selection");
  sweep->add_option("--mode", mode, "axis | grid | phi");
  sweep->add_option("--points", points, "points per axis");
  sweep->add_option("--social", checkpoint, "social policy checkpoint (trained when absent)");
  sweep->add_option("--egoistic", egoistic, "egoistic policy checkpoint (trained when absent)");
  sweep->add_option("--episodes", eval_episodes, "evaluation episodes per point");

  auto* matrix = app.add_subcommand("adapt-matrix", "train per domain, test on every domain");
  matrix->add_option("--synthetic", synthetic, "CSV train,test,crash_pct,dt injected instead of training");
  matrix->add_option("--rows", rows, "training domains, e.g. merge/aggressive");
  matrix->add_option("--cols", cols, "test domains");
  matrix->add_option("--episodes", eval_episodes, "evaluation episodes per cell");

  auto* transfer = app.add_subcommand("transfer", "T1-T6 transfer learning schedule");
  transfer->add_option("--checkpoint-dir", checkpoint_dir, "reuse drive/T1/T4 checkpoints found here");

  auto* classify = app.add_subcommand("classify", "calibrate the SLE classifier and classify behaviours");
  classify->add_option("--log", log, "JSON-lines episode log with state events");
  classify->add_option("--vehicle", vehicle, "vehicle id in the log");
  classify->add_option("--grid-points", grid_points, "points per axis of the parameter grid");

  auto* plot = app.add_subcommand("plot", "render SVG from a matrix or training CSV");
  plot->add_option("input", input, "CSV file (defaults to the config's harness.input)")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    h::ExperimentConfig cfg = config_path.empty() ? h::ExperimentConfig{} : h::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (workers) cfg.harness.workers = *workers;
    if (episodes) cfg.learner.episodes = *episodes;
    if (eval_episodes) cfg.harness.eval_episodes = *eval_episodes;
    if (phi) cfg.reward.phi = *phi;
    if (safe_th) cfg.safety.safe_th = *safe_th;
    if (scenario) cfg.scenario.kind = altruist::sim::scenario_kind_from_string(*scenario);
    if (population) cfg.behaviors.population = h::population_from_string(*population);
    if (checkpoint) cfg.harness.checkpoint = *checkpoint;
    if (policy) cfg.harness.policy = *policy;
    if (mode) cfg.harness.sweep = *mode;
    if (points) cfg.harness.sweep_points = *points;
    if (egoistic) cfg.harness.egoistic_checkpoint = *egoistic;
    if (synthetic) cfg.harness.synthetic = *synthetic;
    if (!rows.empty()) cfg.harness.matrix_rows = rows;
    if (!cols.empty()) cfg.harness.matrix_cols = cols;
    if (checkpoint_dir) cfg.harness.checkpoint_dir = *checkpoint_dir;
    if (log) cfg.harness.log = *log;
    if (vehicle) cfg.harness.vehicle = *vehicle;
    if (grid_points) cfg.harness.grid_points = *grid_points;
    if (input) cfg.harness.input = *input;
    // Round-trip through JSON so overrides get the same validation as the file.
    cfg = nlohmann::json(cfg).get<h::ExperimentConfig>();

    const std::string command = app.get_subcommands().front()->get_name();
    h::ProgressFn progress;
    if (!quiet) progress = [](const std::string& msg) { std::cerr << msg << '\n'; };
    const auto dir = h::run_command(command, cfg, out_dir, progress);
    std::cout << dir.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return EXIT_FAILURE;
  }
  return EXIT_SUCCESS;
}
