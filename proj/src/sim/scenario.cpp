#include "altruist/sim/scenario.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "altruist/driver/idm.hpp"

namespace altruist::sim {
namespace {

constexpr int kMergeRampId = -1;
constexpr int kExitRampId = -2;

// Vehicles of one through lane, front-most and rear-most so far.
struct Chain {
  const Vehicle* front = nullptr;
  const Vehicle* rear = nullptr;
  int placed = 0;
};

const driver::BehaviorParams& spawn_params(const Vehicle& v, const SimConfig& cfg) {
  return v.is_av() ? cfg.av_reference : v.behavior;
}

}  // namespace

void to_json(nlohmann::json& j, const ScenarioConfig& c) {
  j = nlohmann::json{{"kind", std::string(to_string(c.kind))},
                     {"n_avs", c.n_avs},
                     {"n_hvs", c.n_hvs},
                     {"through_lanes", c.through_lanes},
                     {"road_length", c.road_length},
                     {"merge_junction_begin", c.merge_junction_begin},
                     {"merge_junction_end", c.merge_junction_end},
                     {"exit_junction_begin", c.exit_junction_begin},
                     {"exit_junction_end", c.exit_junction_end},
                     {"exit_ramp_length", c.exit_ramp_length},
                     {"meet_time", c.meet_time},
                     {"meet_jitter", c.meet_jitter},
                     {"av_speed", c.av_speed},
                     {"hv_speed", c.hv_speed},
                     {"mission_speed", c.mission_speed},
                     {"hvs_behind", c.hvs_behind},
                     {"av_lanes", c.av_lanes},
                     {"mission_is_av", c.mission_is_av},
                     {"sim", c.sim}};
}

void from_json(const nlohmann::json& j, ScenarioConfig& c) {
  ScenarioConfig d;
  c.kind = scenario_kind_from_string(j.value("kind", std::string(to_string(d.kind))));
  c.n_avs = j.value("n_avs", d.n_avs);
  c.n_hvs = j.value("n_hvs", d.n_hvs);
  c.through_lanes = j.value("through_lanes", d.through_lanes);
  c.road_length = j.value("road_length", d.road_length);
  c.merge_junction_begin = j.value("merge_junction_begin", d.merge_junction_begin);
  c.merge_junction_end = j.value("merge_junction_end", d.merge_junction_end);
  c.exit_junction_begin = j.value("exit_junction_begin", d.exit_junction_begin);
  c.exit_junction_end = j.value("exit_junction_end", d.exit_junction_end);
  c.exit_ramp_length = j.value("exit_ramp_length", d.exit_ramp_length);
  c.meet_time = j.value("meet_time", d.meet_time);
  c.meet_jitter = j.value("meet_jitter", d.meet_jitter);
  c.av_speed = j.value("av_speed", d.av_speed);
  c.hv_speed = j.value("hv_speed", d.hv_speed);
  c.mission_speed = j.value("mission_speed", d.mission_speed);
  c.hvs_behind = j.value("hvs_behind", d.hvs_behind);
  c.av_lanes = j.value("av_lanes", d.av_lanes);
  c.mission_is_av = j.value("mission_is_av", d.mission_is_av);
  c.sim = j.value("sim", d.sim);
}

RoadLayout build_layout(const ScenarioConfig& c) {
  std::vector<Lane> lanes;
  for (int i = 0; i < c.through_lanes; ++i) lanes.push_back({i, i, 0.0, c.road_length, LaneKind::Through});
  std::vector<Ramp> ramps;
  if (c.kind == ScenarioKind::Merge) {
    lanes.push_back({kMergeRampId, -1, 0.0, c.merge_junction_end, LaneKind::MergeRamp});
    ramps.push_back({LaneKind::MergeRamp, kMergeRampId, c.merge_junction_begin, c.merge_junction_end});
  } else if (c.kind == ScenarioKind::Exit) {
    const double end = std::min(c.road_length, c.exit_junction_begin + c.exit_ramp_length);
    lanes.push_back({kExitRampId, -1, c.exit_junction_begin, end, LaneKind::ExitRamp});
    ramps.push_back({LaneKind::ExitRamp, kExitRampId, c.exit_junction_begin, c.exit_junction_end});
  }
  return RoadLayout(std::move(lanes), std::move(ramps), c.road_length);
}

World build_scenario(const ScenarioConfig& c, const driver::BehaviorMix& mix, std::uint64_t seed) {
  if (c.n_avs < 1) throw std::invalid_argument("scenario needs at least one AV");
  if (c.n_hvs < 0) throw std::invalid_argument("negative HV count");
  if (c.av_lanes < 1 || c.av_lanes > c.through_lanes) throw std::invalid_argument("av_lanes out of range");
  const bool has_mission = c.kind != ScenarioKind::Drive;
  if (c.mission_is_av && !has_mission) throw std::invalid_argument("drive scenario has no mission vehicle");
  if (mix.empty() && (c.n_hvs > 0 || (has_mission && !c.mission_is_av))) {
    throw std::invalid_argument("empty behavior mix");
  }

  World w;
  w.layout = build_layout(c);
  w.cfg = c.sim;
  w.scenario = c.kind;
  w.rng_seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> headway_factor(1.5, 3.0);

  const int n_total = c.n_avs + c.n_hvs + (has_mission && !c.mission_is_av ? 1 : 0);
  w.vehicles.resize(static_cast<std::size_t>(n_total));
  for (int i = 0; i < n_total; ++i) {
    Vehicle& v = w.vehicles[static_cast<std::size_t>(i)];
    v.id = i;
    v.kind = i < c.n_avs ? VehicleKind::AV : VehicleKind::HV;
    v.behavior = c.sim.av_reference;
  }

  const double meet_x = c.kind == ScenarioKind::Merge  ? c.merge_junction_begin
                        : c.kind == ScenarioKind::Exit ? c.exit_junction_begin
                                                       : 0.4 * c.road_length;
  std::vector<Chain> chains(static_cast<std::size_t>(c.through_lanes));

  int mission_id = -1;
  if (has_mission) {
    mission_id = c.mission_is_av ? 0 : n_total - 1;
    Vehicle& m = w.vehicle(mission_id);
    if (!m.is_av()) m.behavior = driver::sample_behavior(mix, rng);
    m.mission = c.kind == ScenarioKind::Merge ? Mission::Merge : Mission::Exit;
    m.v = c.mission_speed;
    m.target_speed = c.mission_speed;
    m.x = meet_x - c.mission_speed * c.meet_time;
    if (c.kind == ScenarioKind::Merge) {
      m.lane = kMergeRampId;
    } else {
      m.lane = std::min(1, c.through_lanes - 1);
      Chain& chain = chains[static_cast<std::size_t>(m.lane)];
      chain.front = chain.rear = &m;
      chain.placed = 1;
    }
    w.mission_vehicle_id = mission_id;
  }

  const double anchor =
      meet_x - c.av_speed * c.meet_time + std::uniform_real_distribution<double>(-c.meet_jitter, c.meet_jitter)(rng);

  // Appends `v` to the chain of `lane`, behind its rear or ahead of its front.
  auto place = [&](Vehicle& v, int lane, bool behind, double first_offset) {
    Chain& chain = chains[static_cast<std::size_t>(lane)];
    v.lane = lane;
    if (chain.placed == 0) {
      v.x = anchor + first_offset;
      chain.front = chain.rear = &v;
    } else if (behind) {
      const Vehicle& r = *chain.rear;
      const double gap = headway_factor(rng) * driver::idm_desired_gap(v.v, v.v - r.v, spawn_params(v, w.cfg));
      v.x = r.x - 0.5 * (r.length + v.length) - gap;
      chain.rear = &v;
    } else {
      const Vehicle& f = *chain.front;
      const double gap = headway_factor(rng) * driver::idm_desired_gap(f.v, f.v - v.v, spawn_params(f, w.cfg));
      v.x = f.x + 0.5 * (f.length + v.length) + gap;
      chain.front = &v;
    }
    ++chain.placed;
  };

  int block = 0;
  for (int i = 0; i < c.n_avs; ++i) {
    if (i == mission_id) continue;
    Vehicle& v = w.vehicle(i);
    v.v = c.av_speed;
    v.target_speed = c.av_speed;
    place(v, block % c.av_lanes, true, 0.0);
    ++block;
  }

  std::uniform_real_distribution<double> first_offset(-20.0, 20.0);
  for (int k = 0; k < c.n_hvs; ++k) {
    Vehicle& v = w.vehicle(c.n_avs + k);
    v.behavior = driver::sample_behavior(mix, rng);
    v.v = std::min(c.hv_speed, v.behavior.v0);
    const int lane = k % c.through_lanes;
    const bool behind = c.hvs_behind || chains[static_cast<std::size_t>(lane)].placed % 2 == 0;
    place(v, lane, behind, first_offset(rng));
  }

  for (const Vehicle& v : w.vehicles) {
    const Lane& lane = w.layout.lane(v.lane);
    if (v.rear() < lane.x_begin || v.front() > lane.x_end) {
      throw std::runtime_error("placement infeasible: vehicle " + std::to_string(v.id) + " at x=" +
                               std::to_string(v.x) + " does not fit on lane " + std::to_string(v.lane));
    }
  }
  return w;
}

}  // namespace altruist::sim
