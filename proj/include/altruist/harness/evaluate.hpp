#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "altruist/harness/config.hpp"
#include "altruist/harness/metrics.hpp"
#include "altruist/learn/mlp.hpp"

namespace altruist::harness {

/// Decision rule shared by every AV of an episode, always run through the
/// safety filter.
struct Policy {
  enum class Kind { Network, Random, Constant };
  Kind kind = Kind::Random;
  std::shared_ptr<const learn::Mlp<float>> net;
  sim::MetaAction action = sim::MetaAction::Idle;

  static Policy network(learn::Mlp<float> net);
  static Policy random() { return {}; }
  static Policy constant(sim::MetaAction a) { return {Kind::Constant, nullptr, a}; }

  std::string name() const;
};

/// Everything an evaluation episode depends on besides the policy and seed.
struct EvalSetup {
  sim::ScenarioConfig scenario{};
  driver::BehaviorMix mix = driver::BehaviorMix::uniform_presets();
  reward::RewardConfig reward{};
  safety::SafetyConfig safety{};
  obs::GridSpec grid{};
  bool record_log = false;
};

EvalSetup eval_setup(const ExperimentConfig& c, sim::ScenarioKind kind, Population population);
EvalSetup eval_setup(const ExperimentConfig& c);
EvalSetup eval_setup(const learn::TrainSetup& s);

/// Episode seeds shared by every policy evaluated under `base`.
std::vector<std::uint64_t> eval_seeds(std::uint64_t base, int n);

/// Throws std::invalid_argument when a network policy does not fit the observation size.
EpisodeMetrics run_episode(const Policy& p, const EvalSetup& s, std::uint64_t seed, sim::EventLog* log = nullptr);

/// Episodes in seed order, one at a time.
std::vector<EpisodeMetrics> run_episodes_serial(const Policy& p, const EvalSetup& s,
                                                const std::vector<std::uint64_t>& seeds);
/// Same result as the serial version with episodes spread over `workers` threads.
std::vector<EpisodeMetrics> run_episodes(const Policy& p, const EvalSetup& s, const std::vector<std::uint64_t>& seeds,
                                         int workers);

}  // namespace altruist::harness
