#pragma once

#include <cstdint>

#include <json.hpp>

#include "altruist/driver/behavior.hpp"
#include "altruist/sim/world.hpp"

namespace altruist::sim {

/// Geometry and spawn settings shared by the merge, exit and drive scenarios.
struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::Merge;
  int n_avs = 2;
  int n_hvs = 6;
  int through_lanes = 3;
  double road_length = 2500.0;

  double merge_junction_begin = 1000.0;
  double merge_junction_end = 1100.0;
  double exit_junction_begin = 1000.0;
  double exit_junction_end = 1100.0;
  double exit_ramp_length = 150.0;

  // The AV block is timed to reach the junction together with the mission vehicle.
  double meet_time = 4.0;
  double meet_jitter = 15.0;  // uniform offset (m) of the AV block around the meeting point
  double av_speed = 25.0;
  double hv_speed = 25.0;     // initial HV speed, capped by each driver's v0
  double mission_speed = 20.0;
  bool hvs_behind = true;     // queue every HV behind the vehicles already in its lane
  int av_lanes = 1;           // AVs are spread round-robin over the rightmost `av_lanes` lanes
  bool mission_is_av = false;

  SimConfig sim{};
};

void to_json(nlohmann::json& j, const ScenarioConfig& c);
void from_json(const nlohmann::json& j, ScenarioConfig& c);

RoadLayout build_layout(const ScenarioConfig& c);

/// Builds the initial world. Vehicle ids: AVs first, then HVs, then the
/// mission vehicle (unless it is one of the AVs). Throws std::invalid_argument
/// on bad arguments and std::runtime_error when the vehicles do not fit.
World build_scenario(const ScenarioConfig& c, const driver::BehaviorMix& mix, std::uint64_t seed);

}  // namespace altruist::sim
