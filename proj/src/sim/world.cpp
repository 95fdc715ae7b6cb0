#include "altruist/sim/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "altruist/driver/idm.hpp"
#include "altruist/driver/mobil.hpp"

namespace altruist::sim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool ahead_of(const Vehicle& other, double x, int self_id) {
  return other.x > x || (other.x == x && other.id > self_id);
}

const driver::BehaviorParams& follower_params(const World& w, const Vehicle& v) {
  return v.is_av() ? w.cfg.av_reference : v.behavior;
}

// Effective IDM parameters: a merging vehicle respects the ramp speed limit.
driver::BehaviorParams effective_params(const World& w, const Vehicle& v) {
  driver::BehaviorParams p = v.behavior;
  const Lane* lane = w.layout.find_lane(v.lane);
  if (lane != nullptr && lane->kind == LaneKind::MergeRamp) p.v0 = std::min(p.v0, w.cfg.ramp_speed_limit);
  return p;
}

bool laterally_clear(const World& w, const Vehicle& v, int lane) {
  for (const Vehicle& o : w.vehicles) {
    // A vehicle that left `lane` during this step still occupies it.
    if (o.id == v.id || o.departed || (o.lane != lane && o.vacated_lane != lane)) continue;
    if (std::abs(o.x - v.x) < 0.5 * (o.length + v.length)) return false;
  }
  return true;
}

driver::MobilNeighbors mobil_neighbors(const World& w, const Vehicle& v, int target) {
  driver::MobilNeighbors n;
  n.ego_speed = v.v;
  n.ego_length = v.length;
  auto as_neighbor = [&](const std::optional<NeighborRef>& ref) -> std::optional<driver::Neighbor> {
    if (!ref) return std::nullopt;
    return driver::Neighbor{ref->gap, ref->vehicle->v, follower_params(w, *ref->vehicle)};
  };
  n.old_leader = as_neighbor(leader_in_lane(w, v.lane, v.x, v.length, v.id));
  n.old_follower = as_neighbor(follower_in_lane(w, v.lane, v.x, v.length, v.id));
  n.new_leader = as_neighbor(leader_in_lane(w, target, v.x, v.length, v.id));
  n.new_follower = as_neighbor(follower_in_lane(w, target, v.x, v.length, v.id));
  return n;
}

bool gaps_open(const driver::MobilNeighbors& n) {
  return (!n.new_leader || n.new_leader->gap > 0.0) && (!n.new_follower || n.new_follower->gap > 0.0);
}

void change_lane(World& w, Vehicle& v, int target, std::vector<Event>& events) {
  Event e;
  e.step = w.step_index;
  e.t = w.t;
  e.type = EventType::LaneChange;
  e.vehicles = {v.id};
  e.x = v.x;
  e.lane = target;
  e.from_lane = v.lane;
  v.vacated_lane = v.lane;
  v.lane = target;
  v.last_lane_change_t = w.t;
  ++v.lane_changes_in_tick;
  events.push_back(e);
}

// Lane on the given side an AV may move into. Ramps are reachable only by an AV
// that carries the matching mission.
int adjacent_lane(const RoadLayout& layout, const Vehicle& v, int side) {
  const int lateral = layout.lane(v.lane).lateral + side;
  for (const Lane& l : layout.lanes()) {
    if (l.lateral != lateral || !layout.lane_change_allowed(v.lane, l.id, v.x)) continue;
    if (l.kind == LaneKind::Through) return l.id;
    if (l.kind == LaneKind::ExitRamp && v.mission == Mission::Exit) return l.id;
  }
  return kNoLane;
}

void apply_av_action(World& w, Vehicle& v, MetaAction action, std::vector<Event>& events) {
  const SimConfig& c = w.cfg;
  switch (action) {
    case MetaAction::Accelerate:
      v.target_speed = std::min(v.target_speed + c.av_speed_step, c.av_v_max);
      break;
    case MetaAction::Decelerate:
      v.target_speed = std::max(v.target_speed - c.av_speed_step, c.av_v_min);
      break;
    case MetaAction::ChangeLeft:
    case MetaAction::ChangeRight: {
      const int target = adjacent_lane(w.layout, v, action == MetaAction::ChangeLeft ? 1 : -1);
      if (target != kNoLane && w.layout.lane_change_allowed(v.lane, target, v.x) &&
          laterally_clear(w, v, target)) {
        change_lane(w, v, target, events);
      }
      break;
    }
    case MetaAction::Idle:
      break;
  }
}

// Safety-only change used for mandatory moves of the mission vehicle; both the
// new follower and the ego itself must stay above -b_safe.
bool try_mandatory_change(World& w, Vehicle& v, int target, std::vector<Event>& events) {
  if (!w.layout.lane_change_allowed(v.lane, target, v.x)) return false;
  const driver::MobilNeighbors n = mobil_neighbors(w, v, target);
  if (!gaps_open(n) || !laterally_clear(w, v, target)) return false;
  const auto acc = driver::mobil_accelerations(n, effective_params(w, v));
  if (!driver::mobil_safe(acc, v.behavior) || acc.ego_after <= -v.behavior.b_safe) return false;
  change_lane(w, v, target, events);
  return true;
}

void hv_lane_decisions(World& w, std::vector<Event>& events) {
  for (Vehicle& v : w.vehicles) {
    if (v.is_av() || v.scripted || !v.alive()) continue;
    if (w.t - v.last_lane_change_t < w.cfg.mobil_cooldown) continue;

    if (v.mission != Mission::None && v.mission_status == MissionStatus::Pending) {
      const Lane& lane = w.layout.lane(v.lane);
      if (v.mission == Mission::Merge && lane.kind == LaneKind::MergeRamp) {
        if (const auto target = w.layout.through_lane_at(lane.lateral + 1)) try_mandatory_change(w, v, *target, events);
        continue;
      }
      if (v.mission == Mission::Exit && lane.kind == LaneKind::Through) {
        if (const auto right = w.layout.through_lane_at(lane.lateral - 1)) {
          try_mandatory_change(w, v, *right, events);
        } else if (const Ramp* exit = w.layout.exit_ramp()) {
          try_mandatory_change(w, v, exit->lane_id, events);
        }
        continue;
      }
    }
    if (!w.layout.is_through(v.lane)) continue;

    int best_lane = kNoLane;
    double best_incentive = -kInf;
    const int lateral = w.layout.lane(v.lane).lateral;
    for (int side : {1, -1}) {
      const auto candidate = w.layout.through_lane_at(lateral + side);
      if (!candidate || !w.layout.lane_change_allowed(v.lane, *candidate, v.x)) continue;
      const int target = *candidate;
      const driver::MobilNeighbors n = mobil_neighbors(w, v, target);
      if (!gaps_open(n) || !laterally_clear(w, v, target)) continue;
      const auto acc = driver::mobil_accelerations(n, v.behavior);
      if (driver::mobil_decide(acc, v.behavior) != driver::LaneDecision::Change) continue;
      const double incentive = driver::mobil_incentive(acc, v.behavior);
      if (incentive > best_incentive) {
        best_incentive = incentive;
        best_lane = target;
      }
    }
    if (best_lane != kNoLane) change_lane(w, v, best_lane, events);
  }
}

double acceleration(const World& w, const Vehicle& v) {
  if (v.is_av()) {
    const SimConfig& c = w.cfg;
    return std::clamp(c.av_speed_gain * (v.target_speed - v.v), -c.av_brake, c.av_a_max);
  }
  if (v.scripted) return 0.0;
  const driver::BehaviorParams p = effective_params(w, v);
  const auto leader = leader_in_lane(w, v.lane, v.x, v.length, v.id);
  if (!leader) return driver::idm_acceleration(v.v, 0.0, kInf, p);
  return driver::idm_acceleration(v.v, v.v - leader->vehicle->v, leader->gap, p);
}

MissionStatus evaluate_mission(const World& w, const Vehicle& v) {
  if (v.crashed) return MissionStatus::Failed;
  const Lane* lane = w.layout.find_lane(v.lane);
  if (v.mission == Mission::Merge) {
    const Ramp* ramp = w.layout.merge_ramp();
    if (lane != nullptr && lane->kind == LaneKind::Through && (ramp == nullptr || v.x > ramp->junction_begin)) {
      return MissionStatus::Accomplished;
    }
    if (v.departed) return MissionStatus::Failed;
    return MissionStatus::Pending;
  }
  if (v.mission == Mission::Exit) {
    if (lane != nullptr && lane->kind == LaneKind::ExitRamp) return MissionStatus::Accomplished;
    const Ramp* ramp = w.layout.exit_ramp();
    if (v.departed || (ramp != nullptr && v.x >= ramp->junction_end)) return MissionStatus::Failed;
    return MissionStatus::Pending;
  }
  return MissionStatus::Pending;
}

Event make_event(const World& w, EventType type, std::vector<int> ids, const Vehicle& v) {
  Event e;
  e.step = w.step_index;
  e.t = w.t;
  e.type = type;
  e.vehicles = std::move(ids);
  e.x = v.x;
  e.lane = v.lane;
  return e;
}

}  // namespace

std::string_view to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::Merge: return "merge";
    case ScenarioKind::Exit: return "exit";
    case ScenarioKind::Drive: return "drive";
  }
  return "drive";
}

ScenarioKind scenario_kind_from_string(std::string_view name) {
  if (name == "merge" || name == "f_m") return ScenarioKind::Merge;
  if (name == "exit" || name == "f_e") return ScenarioKind::Exit;
  if (name == "drive") return ScenarioKind::Drive;
  throw std::invalid_argument("unknown scenario: " + std::string(name));
}

int SimConfig::substeps_per_decision() const {
  const long n = std::lround(decision_period / dt);
  return static_cast<int>(std::max(1L, n));
}

void to_json(nlohmann::json& j, const SimConfig& c) {
  j = nlohmann::json{{"dt", c.dt},
                     {"decision_period", c.decision_period},
                     {"horizon", c.horizon},
                     {"resolution_tail", c.resolution_tail},
                     {"av_speed_step", c.av_speed_step},
                     {"av_v_min", c.av_v_min},
                     {"av_v_max", c.av_v_max},
                     {"av_speed_gain", c.av_speed_gain},
                     {"av_a_max", c.av_a_max},
                     {"av_brake", c.av_brake},
                     {"mobil_cooldown", c.mobil_cooldown},
                     {"ramp_speed_limit", c.ramp_speed_limit},
                     {"mission_window", c.mission_window},
                     {"av_reference", c.av_reference}};
}

void from_json(const nlohmann::json& j, SimConfig& c) {
  SimConfig d;
  c.dt = j.value("dt", d.dt);
  c.decision_period = j.value("decision_period", d.decision_period);
  c.horizon = j.value("horizon", d.horizon);
  c.resolution_tail = j.value("resolution_tail", d.resolution_tail);
  c.av_speed_step = j.value("av_speed_step", d.av_speed_step);
  c.av_v_min = j.value("av_v_min", d.av_v_min);
  c.av_v_max = j.value("av_v_max", d.av_v_max);
  c.av_speed_gain = j.value("av_speed_gain", d.av_speed_gain);
  c.av_a_max = j.value("av_a_max", d.av_a_max);
  c.av_brake = j.value("av_brake", d.av_brake);
  c.mobil_cooldown = j.value("mobil_cooldown", d.mobil_cooldown);
  c.ramp_speed_limit = j.value("ramp_speed_limit", d.ramp_speed_limit);
  c.mission_window = j.value("mission_window", d.mission_window);
  c.av_reference = j.value("av_reference", d.av_reference);
  if (!(c.dt > 0.0) || !(c.decision_period >= c.dt) || !(c.horizon > 0.0)) {
    throw std::invalid_argument("sim config: dt, decision_period and horizon must be positive");
  }
}

Vehicle& World::vehicle(int id) {
  if (id < 0 || id >= static_cast<int>(vehicles.size())) {
    throw std::out_of_range("unknown vehicle id " + std::to_string(id));
  }
  return vehicles[static_cast<std::size_t>(id)];
}

const Vehicle& World::vehicle(int id) const { return const_cast<World*>(this)->vehicle(id); }

const Vehicle* World::find(int id) const {
  if (id < 0 || id >= static_cast<int>(vehicles.size())) return nullptr;
  return &vehicles[static_cast<std::size_t>(id)];
}

const Vehicle* World::mission_vehicle() const { return find(mission_vehicle_id); }

World World::projection_copy() const {
  World w;
  w.layout = layout;
  w.vehicles = vehicles;
  w.cfg = cfg;
  w.scenario = scenario;
  w.t = t;
  w.step_index = step_index;
  w.rng_seed = rng_seed;
  w.mission_vehicle_id = mission_vehicle_id;
  return w;
}

std::vector<int> World::live_av_ids() const {
  std::vector<int> ids;
  for (const Vehicle& v : vehicles) {
    if (v.is_av() && v.alive()) ids.push_back(v.id);
  }
  return ids;
}

std::optional<NeighborRef> leader_in_lane(const World& w, int lane, double x, double length, int self_id) {
  std::optional<NeighborRef> best;
  const Vehicle* best_vehicle = nullptr;
  for (const Vehicle& o : w.vehicles) {
    if (o.id == self_id || o.departed || o.lane != lane || !ahead_of(o, x, self_id)) continue;
    if (best_vehicle == nullptr || o.x < best_vehicle->x || (o.x == best_vehicle->x && o.id < best_vehicle->id)) {
      best_vehicle = &o;
    }
  }
  if (best_vehicle != nullptr) {
    best = NeighborRef{best_vehicle, (best_vehicle->x - x) - 0.5 * (best_vehicle->length + length)};
  }
  return best;
}

std::optional<NeighborRef> follower_in_lane(const World& w, int lane, double x, double length, int self_id) {
  std::optional<NeighborRef> best;
  const Vehicle* best_vehicle = nullptr;
  for (const Vehicle& o : w.vehicles) {
    if (o.id == self_id || o.departed || o.lane != lane || ahead_of(o, x, self_id)) continue;
    if (best_vehicle == nullptr || o.x > best_vehicle->x || (o.x == best_vehicle->x && o.id > best_vehicle->id)) {
      best_vehicle = &o;
    }
  }
  if (best_vehicle != nullptr) {
    best = NeighborRef{best_vehicle, (x - best_vehicle->x) - 0.5 * (best_vehicle->length + length)};
  }
  return best;
}

std::vector<Event> step(World& w, const ActionMap& actions) {
  if (is_terminal(w)) throw std::logic_error("step called on a terminal world");
  return step_unchecked(w, actions);
}

std::vector<Event> step_unchecked(World& w, const ActionMap& actions) {
  for (const auto& [id, action] : actions) {
    const Vehicle* v = w.find(id);
    if (v == nullptr || !v->is_av()) {
      throw std::invalid_argument("action for unknown agent " + std::to_string(id));
    }
    if (!v->alive()) throw std::invalid_argument("action for crashed or departed agent " + std::to_string(id));
    if (action_index(action) < 0 || action_index(action) >= kActionCount) {
      throw std::invalid_argument("unknown meta-action");
    }
  }
  for (const Vehicle& v : w.vehicles) {
    if (v.is_av() && v.alive() && !actions.contains(v.id)) {
      throw std::invalid_argument("missing action for agent " + std::to_string(v.id));
    }
  }

  std::vector<Event> events;
  const bool tick = w.at_decision_tick();
  for (Vehicle& v : w.vehicles) {
    v.vacated_lane = kNoLane;
    if (tick) {
      v.lane_changes_in_tick = 0;
      v.crashed_in_tick = false;
    }
  }

  for (const auto& [id, action] : actions) apply_av_action(w, w.vehicle(id), action, events);
  if (tick) hv_lane_decisions(w, events);

  std::vector<double> acc(w.vehicles.size(), 0.0);
  for (const Vehicle& v : w.vehicles) {
    if (v.alive()) acc[static_cast<std::size_t>(v.id)] = acceleration(w, v);
  }

  const double dt = w.cfg.dt;
  for (Vehicle& v : w.vehicles) {
    if (!v.alive()) continue;
    const double a = acc[static_cast<std::size_t>(v.id)];
    const double v_next = v.v + a * dt;
    double dx;
    if (v_next < 0.0) {
      dx = a < 0.0 ? 0.5 * v.v * (v.v / -a) : 0.0;
      v.v = 0.0;
    } else {
      dx = 0.5 * (v.v + v_next) * dt;
      v.v = v_next;
    }
    v.a = a;
    v.x += dx;
    v.distance_traveled += dx;
  }

  w.step_index += 1;
  w.t = static_cast<double>(w.step_index) * dt;

  for (Vehicle& v : w.vehicles) {
    if (!v.alive()) continue;
    const Lane& lane = w.layout.lane(v.lane);
    const bool off_road = v.rear() > w.layout.length();
    const bool ramp_ended = lane.kind != LaneKind::Through && v.front() >= lane.x_end;
    if (off_road || ramp_ended) {
      v.departed = true;
      events.push_back(make_event(w, EventType::Departed, {v.id}, v));
    }
  }

  for (std::size_t i = 0; i < w.vehicles.size(); ++i) {
    Vehicle& a = w.vehicles[i];
    if (a.departed) continue;
    for (std::size_t j = i + 1; j < w.vehicles.size(); ++j) {
      Vehicle& b = w.vehicles[j];
      if (b.departed || (a.crashed && b.crashed)) continue;
      const bool shared_lane = a.lane == b.lane || (a.vacated_lane != kNoLane && a.vacated_lane == b.lane) ||
                               (b.vacated_lane != kNoLane && b.vacated_lane == a.lane) ||
                               (a.vacated_lane != kNoLane && a.vacated_lane == b.vacated_lane);
      if (!shared_lane || std::abs(a.x - b.x) >= 0.5 * (a.length + b.length)) continue;
      Event e = make_event(w, EventType::Collision, {a.id, b.id}, a);
      e.x = 0.5 * (a.x + b.x);
      events.push_back(e);
      for (Vehicle* v : {&a, &b}) {
        if (v->crashed) continue;
        v->crashed = true;
        v->crashed_in_tick = true;
        v->v = 0.0;
        v->a = 0.0;
      }
    }
  }

  for (Vehicle& v : w.vehicles) {
    if (v.mission == Mission::None || v.mission_status != MissionStatus::Pending) continue;
    const MissionStatus s = evaluate_mission(w, v);
    if (s == MissionStatus::Pending) continue;
    v.mission_status = s;
    v.mission_resolved_t = w.t;
    events.push_back(make_event(w, s == MissionStatus::Accomplished ? EventType::MissionAccomplished
                                                                     : EventType::MissionFailed,
                                {v.id}, v));
  }

  for (const Event& e : events) w.log.append(e);
  if (w.log.record_states) {
    for (const Vehicle& v : w.vehicles) {
      if (v.departed) continue;
      Event e = make_event(w, EventType::State, {v.id}, v);
      e.v = v.v;
      w.log.append(e);
    }
  }
  return events;
}

std::vector<Event> advance(World& w, const ActionMap& actions) {
  std::vector<Event> events = step(w, actions);
  const int n = w.cfg.substeps_per_decision();
  for (int i = 1; i < n && !is_terminal(w); ++i) {
    std::vector<Event> more = step(w, idle_actions(w));
    events.insert(events.end(), more.begin(), more.end());
  }
  return events;
}

ActionMap idle_actions(const World& w) {
  ActionMap m;
  for (int id : w.live_av_ids()) m.emplace(id, MetaAction::Idle);
  return m;
}

MissionStatus mission_status(const World& w, const Vehicle& v) {
  if (v.mission == Mission::None) throw std::invalid_argument("vehicle has no mission");
  if (v.mission_status != MissionStatus::Pending) return v.mission_status;
  return evaluate_mission(w, v);
}

bool mission_recently_accomplished(const World& w, const Vehicle& v) {
  if (v.mission == Mission::None || v.mission_status != MissionStatus::Accomplished) return false;
  return w.t - v.mission_resolved_t <= w.cfg.mission_window + 1e-9;
}

bool is_terminal(const World& w) {
  const long horizon_steps = std::lround(w.cfg.horizon / w.cfg.dt);
  if (w.step_index >= horizon_steps) return true;
  bool any_live_av = false;
  for (const Vehicle& v : w.vehicles) {
    if (v.is_av() && v.crashed) return true;
    if (v.is_av() && v.alive()) any_live_av = true;
  }
  if (!any_live_av) return true;
  if (const Vehicle* m = w.mission_vehicle()) {
    if (m->crashed) return true;
    if (m->mission_status != MissionStatus::Pending) {
      const long tail_steps = std::lround(w.cfg.resolution_tail / w.cfg.dt);
      const long resolved_step = std::lround(m->mission_resolved_t / w.cfg.dt);
      if (w.step_index >= resolved_step + tail_steps) return true;
    }
  }
  return false;
}

double speed_bound(const World& w) {
  double bound = w.cfg.av_v_max;
  for (const Vehicle& v : w.vehicles) {
    if (!v.is_av()) bound = std::max(bound, v.behavior.v0);
  }
  return bound;
}

nlohmann::json snapshot(const World& w) {
  nlohmann::json j;
  j["layout"] = w.layout;
  j["cfg"] = w.cfg;
  j["scenario"] = std::string(to_string(w.scenario));
  j["t"] = w.t;
  j["step"] = w.step_index;
  j["seed"] = w.rng_seed;
  j["mission_vehicle"] = w.mission_vehicle_id;
  for (const Vehicle& v : w.vehicles) {
    nlohmann::json jv{{"id", v.id},
                      {"kind", std::string(to_string(v.kind))},
                      {"mission", std::string(to_string(v.mission))},
                      {"x", v.x},
                      {"lane", v.lane},
                      {"v", v.v},
                      {"a", v.a},
                      {"length", v.length},
                      {"width", v.width},
                      {"target_speed", v.target_speed},
                      {"svo_phi", v.svo_phi},
                      {"crashed", v.crashed},
                      {"departed", v.departed},
                      {"scripted", v.scripted},
                      {"mission_status", std::string(to_string(v.mission_status))}};
    if (!v.is_av()) jv["behavior"] = v.behavior;
    j["vehicles"].push_back(jv);
  }
  return j;
}

}  // namespace altruist::sim
