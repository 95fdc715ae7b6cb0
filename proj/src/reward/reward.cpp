#include "altruist/reward/reward.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace altruist::reward {

void RewardConfig::validate() const {
  if (!(phi >= 0.0 && phi <= std::numbers::pi / 2.0 + 1e-12)) throw std::invalid_argument("reward: phi outside [0, pi/2]");
  if (!(lambda >= 0.0) || !(mu >= 0.0)) throw std::invalid_argument("reward: exponents must be >= 0");
  if (!(d_floor > 0.0)) throw std::invalid_argument("reward: d_floor must be > 0");
  if (!(v_max > 0.0)) throw std::invalid_argument("reward: v_max must be > 0");
  if (!(r_unsafe <= 0.0)) throw std::invalid_argument("reward: r_unsafe must be <= 0");
}

void to_json(nlohmann::json& j, const RewardConfig& c) {
  j = nlohmann::json{{"phi", c.phi},
                     {"lambda", c.lambda},
                     {"mu", c.mu},
                     {"w_speed", c.w_speed},
                     {"w_crash", c.w_crash},
                     {"w_lane_change", c.w_lane_change},
                     {"lane_change_cost", c.lane_change_cost},
                     {"v_max", c.v_max},
                     {"av_importance", c.av_importance},
                     {"hv_importance", c.hv_importance},
                     {"av_mission_weight", c.av_mission_weight},
                     {"hv_mission_weight", c.hv_mission_weight},
                     {"d_floor", c.d_floor},
                     {"lane_width", c.lane_width},
                     {"perception", c.perception},
                     {"r_unsafe", c.r_unsafe}};
}

void from_json(const nlohmann::json& j, RewardConfig& c) {
  RewardConfig d;
  c.phi = j.value("phi", d.phi);
  c.lambda = j.value("lambda", d.lambda);
  c.mu = j.value("mu", d.mu);
  c.w_speed = j.value("w_speed", d.w_speed);
  c.w_crash = j.value("w_crash", d.w_crash);
  c.w_lane_change = j.value("w_lane_change", d.w_lane_change);
  c.lane_change_cost = j.value("lane_change_cost", d.lane_change_cost);
  c.v_max = j.value("v_max", d.v_max);
  c.av_importance = j.value("av_importance", d.av_importance);
  c.hv_importance = j.value("hv_importance", d.hv_importance);
  c.av_mission_weight = j.value("av_mission_weight", d.av_mission_weight);
  c.hv_mission_weight = j.value("hv_mission_weight", d.hv_mission_weight);
  c.d_floor = j.value("d_floor", d.d_floor);
  c.lane_width = j.value("lane_width", d.lane_width);
  c.perception = j.value("perception", d.perception);
  c.r_unsafe = j.value("r_unsafe", d.r_unsafe);
  c.validate();
}

double metric_sum(const sim::World&, const sim::Vehicle& v, const RewardConfig& c) {
  const double speed = std::clamp(v.v / c.v_max, -1.0, 1.0);
  const double crash = v.crashed_in_tick ? -1.0 : 0.0;
  const double lane = std::clamp(-c.lane_change_cost * v.lane_changes_in_tick, -1.0, 1.0);
  return c.w_speed * speed + c.w_crash * crash + c.w_lane_change * lane;
}

double ego_reward(const sim::World& w, int agent, const RewardConfig& c) {
  return metric_sum(w, w.vehicle(agent), c);
}

double vehicle_distance(const sim::Vehicle& a, const sim::Vehicle& b, const sim::RoadLayout& layout,
                        const RewardConfig& c) {
  const double lateral = c.lane_width * (layout.lane(a.lane).lateral - layout.lane(b.lane).lateral);
  return std::max(c.d_floor, std::hypot(a.x - b.x, lateral));
}

namespace {

bool visible(const sim::Vehicle& ego, const sim::Vehicle& other, const RewardConfig& c) {
  return other.id != ego.id && !other.departed && std::abs(other.x - ego.x) <= c.perception;
}

}  // namespace

double mission_reward(const sim::World& w, int agent, int other, const RewardConfig& c) {
  const sim::Vehicle& ego = w.vehicle(agent);
  const sim::Vehicle& o = w.vehicle(other);
  if (o.mission == sim::Mission::None || !sim::mission_recently_accomplished(w, o)) return 0.0;
  const double weight = o.is_av() ? c.av_mission_weight : c.hv_mission_weight;
  return weight / std::pow(vehicle_distance(ego, o, w.layout, c), c.mu);
}

double social_reward(const sim::World& w, int agent, const RewardConfig& c) {
  const sim::Vehicle& ego = w.vehicle(agent);
  double total = 0.0;
  for (const sim::Vehicle& o : w.vehicles) {
    if (!visible(ego, o, c)) continue;
    const double d = vehicle_distance(ego, o, w.layout, c);
    const double importance = o.is_av() ? c.av_importance : c.hv_importance;
    if (importance != 0.0) total += importance / std::pow(d, c.lambda) * metric_sum(w, o, c);
    total += mission_reward(w, agent, o.id, c);
  }
  return total;
}

double agent_reward(const sim::World& w, int agent, const RewardConfig& c) {
  return total_reward(ego_reward(w, agent, c), social_reward(w, agent, c), c.phi);
}

double reward_bound(const RewardConfig& c, int n_others) {
  const double metrics = std::abs(c.w_speed) + std::abs(c.w_crash) + std::abs(c.w_lane_change);
  const double importance = std::max(std::abs(c.av_importance), std::abs(c.hv_importance));
  const double mission = std::max(std::abs(c.av_mission_weight), std::abs(c.hv_mission_weight));
  const double per_other = importance / std::pow(c.d_floor, c.lambda) * metrics + mission / std::pow(c.d_floor, c.mu);
  return std::cos(c.phi) * metrics + std::sin(c.phi) * n_others * per_other;
}

}  // namespace altruist::reward
