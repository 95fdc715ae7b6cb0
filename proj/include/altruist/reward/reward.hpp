#pragma once

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "altruist/sim/world.hpp"

namespace altruist::reward {

struct RewardConfig {
  double phi = std::numbers::pi / 4.0;
  double lambda = 1.0;  // distance exponent of the cooperation/sympathy terms
  double mu = 1.0;      // distance exponent of the mission term

  // Traffic metrics: weight and raw value per event.
  double w_speed = 0.4;
  double w_crash = 1.0;
  double w_lane_change = 1.0;
  double lane_change_cost = 0.05;
  double v_max = 30.0;  // speed normalizer

  double av_importance = 1.0;  // W_j
  double hv_importance = 1.0;  // W_k
  double av_mission_weight = 1.0;
  double hv_mission_weight = 1.0;

  double d_floor = 1.0;
  double lane_width = 4.0;  // lateral spacing used for inter-vehicle distances (m)
  double perception = 60.0;
  double r_unsafe = -1.0;

  void validate() const;
};

void to_json(nlohmann::json& j, const RewardConfig& c);
void from_json(const nlohmann::json& j, RewardConfig& c);

/// Weighted sum of a vehicle's own traffic metrics, each normalized to [-1, 1].
double metric_sum(const sim::World& w, const sim::Vehicle& v, const RewardConfig& c);

double ego_reward(const sim::World& w, int agent, const RewardConfig& c);

/// Distance between two vehicles, floored at d_floor.
double vehicle_distance(const sim::Vehicle& a, const sim::Vehicle& b, const sim::RoadLayout& layout,
                        const RewardConfig& c);

double mission_reward(const sim::World& w, int agent, int other, const RewardConfig& c);
double social_reward(const sim::World& w, int agent, const RewardConfig& c);

inline double total_reward(double ego, double social, double phi) {
  return std::cos(phi) * ego + std::sin(phi) * social;
}

/// Full decentralized reward of `agent` for the decision period just simulated.
double agent_reward(const sim::World& w, int agent, const RewardConfig& c);

/// Upper bound on |agent_reward| with `n_others` other vehicles on the road.
double reward_bound(const RewardConfig& c, int n_others);

}  // namespace altruist::reward
