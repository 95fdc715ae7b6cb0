#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "altruist/analysis/classifier.hpp"
#include "altruist/driver/behavior.hpp"
#include "altruist/learn/trainer.hpp"
#include "altruist/reward/reward.hpp"
#include "altruist/safety/prioritizer.hpp"
#include "altruist/sim/scenario.hpp"

namespace altruist::harness {

/// HV population of a domain.
enum class Population { Aggressive, Moderate, Conservative, Mixed };

std::string_view to_string(Population p);
Population population_from_string(std::string_view name);

/// Preset bundles plus the weights of the mixed population.
struct BehaviorsConfig {
  driver::BehaviorParams aggressive = driver::aggressive_params();
  driver::BehaviorParams moderate = driver::moderate_params();
  driver::BehaviorParams conservative = driver::conservative_params();
  std::array<double, 3> mix_weights{1.0, 1.0, 1.0};  // aggressive, moderate, conservative
  Population population = Population::Mixed;          // used by train and eval

  driver::BehaviorMix mix(Population p) const;
  driver::BehaviorMix mix() const { return mix(population); }
};

void to_json(nlohmann::json& j, const BehaviorsConfig& c);
void from_json(const nlohmann::json& j, BehaviorsConfig& c);

struct HarnessConfig {
  int eval_episodes = 100;
  int workers = 1;
  double w_s = 2.0 / 3.0;
  double w_e = 1.0 / 3.0;
  double phi_egoistic = 0.0;
  std::vector<double> phi_candidates{0.0, 0.39269908169872414, 0.78539816339744828, 1.1780972450961724,
                                     1.5707963267948966};
  int smoothing_window = 100;
  bool svg = true;

  // eval
  std::string policy = "network";  // network | random | idle
  std::string checkpoint;

  // sweep
  std::string sweep = "axis";  // axis | grid | phi
  int sweep_points = 5;
  std::string egoistic_checkpoint;

  // adapt-matrix
  std::vector<std::string> matrix_rows;  // domain names; empty means all eight
  std::vector<std::string> matrix_cols;
  std::string synthetic;  // CSV of injected per-cell crash/dt values

  // transfer
  std::string checkpoint_dir;  // reuse T-family checkpoints found here

  // classify
  analysis::CalibrationConfig calibration{};
  int calibration_seeds = 20;
  std::optional<analysis::ClassifierConfig> classifier;  // calibrated on demand when absent
  std::string log;       // JSON-lines episode log to classify offline
  int vehicle = -1;      // vehicle of `log`; -1 classifies every vehicle in it
  int grid_points = 3;   // per axis of the behaviour sweep grid

  // plot
  std::string input;  // CSV written by an earlier run
};

void to_json(nlohmann::json& j, const HarnessConfig& c);
void from_json(const nlohmann::json& j, HarnessConfig& c);

struct ExperimentConfig {
  std::uint64_t seed = 1;
  sim::ScenarioConfig scenario{};
  BehaviorsConfig behaviors{};
  reward::RewardConfig reward{};
  safety::SafetyConfig safety{};
  learn::LearnerConfig learner{};
  obs::GridSpec observation{};
  HarnessConfig harness{};

  /// Training setup for `scenario` kind and `population`, with AV angle `phi`.
  learn::TrainSetup train_setup(sim::ScenarioKind kind, Population population, double phi) const;
  learn::TrainSetup train_setup() const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
/// Missing keys keep their defaults; unknown top-level sections are rejected.
void from_json(const nlohmann::json& j, ExperimentConfig& c);

ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace altruist::harness
