#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "altruist/driver/behavior.hpp"
#include "altruist/learn/q_function.hpp"
#include "altruist/learn/replay.hpp"
#include "altruist/obs/velocity_map.hpp"
#include "altruist/reward/reward.hpp"
#include "altruist/safety/prioritizer.hpp"
#include "altruist/sim/scenario.hpp"

namespace altruist::learn {

struct LearnerConfig {
  std::vector<int> hidden{256, 128};
  AdamConfig adam{};
  double gamma = 0.95;
  int batch = 32;
  int buffer = 8000;
  int target_update = 300;
  int n_iterations = 200;  // decision ticks between weight broadcasts
  int pre_store = 50;      // episodes collected before the first gradient step
  int episodes = 600;
  double eps_start = 1.0;
  double eps_end = 0.05;
  double eps_fraction = 0.8;  // share of the post-pre-store episodes spent decaying
  std::array<double, kStrata> replay_shares{0.25, 0.25, 0.5};
  bool store_all_agents = true;
  Backend backend = Backend::OpenMP;

  void validate() const;
};

void to_json(nlohmann::json& j, const LearnerConfig& c);
void from_json(const nlohmann::json& j, LearnerConfig& c);

/// Everything one training run depends on.
struct TrainSetup {
  sim::ScenarioConfig scenario{};
  driver::BehaviorMix mix = driver::BehaviorMix::uniform_presets();
  reward::RewardConfig reward{};
  safety::SafetyConfig safety{};
  obs::GridSpec grid{};
  LearnerConfig learner{};
  std::uint64_t seed = 0;
};

std::vector<int> topology(const obs::GridSpec& g, const LearnerConfig& c);

struct EpisodeLog {
  int episode = 0;
  double ret = 0.0;      // mean over AVs of the summed per-tick rewards
  int crashes = 0;       // 1 when an AV or the mission vehicle crashed
  int mission = 0;       // 1 when the mission was accomplished
  double epsilon = 0.0;
  double loss = 0.0;     // mean loss of the episode's gradient steps, NaN without any
  int interventions = 0;
  int gradient_steps = 0;
};

struct TrainResult {
  QFunction q;
  std::vector<EpisodeLog> log;
};

/// Exploration rate of training episode `episode`.
double episode_epsilon(int episode, const LearnerConfig& c);

/// Semi-sequential multi-agent DDQN with safety filtering and unsafe-experience
/// injection. `initial` warm-starts the online and target weights.
TrainResult train_marl(const TrainSetup& setup, const std::optional<std::vector<float>>& initial = std::nullopt,
                       const std::function<void(const EpisodeLog&)>& on_episode = {});

/// Flattened pooled state of `ego` after pushing the current frame.
std::vector<float> observe(const sim::World& w, int ego, obs::StackedState& stack, const obs::GridSpec& g);

}  // namespace altruist::learn
