#pragma once

#include <array>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include <json.hpp>

#include "altruist/sim/world.hpp"

namespace altruist::safety {

struct SafetyConfig {
  double safe_th = 1.5;  // s; 0 disables the mask
  int n_steps = 10;      // projected decision ticks
  double ttc_cap = 100.0;

  void validate() const;
};

void to_json(nlohmann::json& j, const SafetyConfig& c);
void from_json(const nlohmann::json& j, SafetyConfig& c);

/// Minimum projected time-to-collision (s) of `ego` after taking `action`,
/// with HVs running their own IDM/MOBIL and other AVs idling, capped at
/// cfg.ttc_cap.
double safety_score(const sim::World& w, int ego, sim::MetaAction action, const SafetyConfig& cfg);

enum class Mode { Train, Test };

using ActionValues = std::array<double, sim::kActionCount>;

struct FilterResult {
  sim::MetaAction chosen = sim::MetaAction::Idle;
  bool explored = false;
  bool fallback = false;  // every action was unsafe
  std::vector<std::pair<sim::MetaAction, double>> rejected;
  ActionValues scores;  // NaN where not evaluated

  bool intervened() const { return !rejected.empty(); }
};

/// Selection rule behind filter_actions with the scores supplied by
/// `score`, which is called at most once per action and only when needed.
FilterResult select_action(const ActionValues& q, const std::function<double(sim::MetaAction)>& score,
                           double safe_th, Mode mode, double epsilon, std::mt19937_64& rng);

/// Masked action selection. In Train mode one uniform draw decides
/// exploration (probability `epsilon`): exploring picks uniformly among the
/// safe actions, exploiting and Test mode pick the best Q-value among them.
/// With no safe action the highest-scoring action is taken.
FilterResult filter_actions(const sim::World& w, int ego, const ActionValues& q, const SafetyConfig& cfg, Mode mode,
                            double epsilon, std::mt19937_64& rng);

/// Index of the largest value, lowest index on ties.
int argmax(const ActionValues& q);

/// Appends one SafetyMask event per evaluated action when mask logging is on.
void log_mask(sim::World& w, int ego, const FilterResult& r);

}  // namespace altruist::safety
