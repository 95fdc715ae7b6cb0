#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <json.hpp>

#include "altruist/driver/behavior.hpp"
#include "altruist/sim/event_log.hpp"
#include "altruist/sim/road_layout.hpp"
#include "altruist/sim/vehicle.hpp"

namespace altruist::sim {

enum class ScenarioKind { Merge, Exit, Drive };

std::string_view to_string(ScenarioKind k);
ScenarioKind scenario_kind_from_string(std::string_view name);

struct SimConfig {
  double dt = 0.1;
  double decision_period = 1.0;
  double horizon = 60.0;
  double resolution_tail = 5.0;  // episode keeps running this long after the mission resolves

  // Meta-action controller of the AVs.
  double av_speed_step = 5.0;
  double av_v_min = 0.0;
  double av_v_max = 30.0;
  double av_speed_gain = 2.0;  // proportional gain (1/s)
  double av_a_max = 3.0;
  double av_brake = 6.0;

  double mobil_cooldown = 2.0;
  double ramp_speed_limit = 20.0;
  double mission_window = 5.0;  // how long an accomplished mission stays "recent"

  // IDM parameters other drivers assume for an AV when assessing it as a follower.
  driver::BehaviorParams av_reference = driver::typical_params();

  int substeps_per_decision() const;
};

void to_json(nlohmann::json& j, const SimConfig& c);
void from_json(const nlohmann::json& j, SimConfig& c);

using ActionMap = std::map<int, MetaAction>;

/// Complete mutable simulation state. A World is confined to one worker.
class World {
 public:
  RoadLayout layout;
  std::vector<Vehicle> vehicles;
  SimConfig cfg;
  ScenarioKind scenario = ScenarioKind::Drive;
  double t = 0.0;
  long step_index = 0;
  std::uint64_t rng_seed = 0;
  int mission_vehicle_id = -1;
  EventLog log;

  Vehicle& vehicle(int id);
  const Vehicle& vehicle(int id) const;
  const Vehicle* find(int id) const;
  const Vehicle* mission_vehicle() const;

  bool at_decision_tick() const { return step_index % cfg.substeps_per_decision() == 0; }

  /// Copy without the event log, used for forward projection.
  World projection_copy() const;

  std::vector<int> live_av_ids() const;
};

/// Leader/follower lookup result: the neighbour and the bumper gap to it.
struct NeighborRef {
  const Vehicle* vehicle = nullptr;
  double gap = 0.0;
};

/// Nearest non-departed vehicle ahead of a body centred at `x` with length
/// `length` in `lane`, ignoring `self_id`.
std::optional<NeighborRef> leader_in_lane(const World& w, int lane, double x, double length, int self_id);
std::optional<NeighborRef> follower_in_lane(const World& w, int lane, double x, double length, int self_id);

/// Advances the world by one dt. `actions` must hold exactly one entry for
/// every live AV; the meta-actions take effect immediately. HV lane-change
/// decisions are evaluated only on decision ticks. Throws
/// std::invalid_argument for actions addressed to unknown, crashed or
/// departed vehicles, or when a live AV has no action, and std::logic_error
/// when the world is already terminal.
std::vector<Event> step(World& w, const ActionMap& actions);

/// step() without the terminal-state precondition, for forward projections
/// that must keep rolling after an unrelated crash.
std::vector<Event> step_unchecked(World& w, const ActionMap& actions);

/// Runs one decision period: `actions` on the first dt, Idle afterwards.
std::vector<Event> advance(World& w, const ActionMap& actions);

/// Action map assigning Idle to every live AV.
ActionMap idle_actions(const World& w);

MissionStatus mission_status(const World& w, const Vehicle& v);

/// Accomplished within the last `cfg.mission_window` seconds.
bool mission_recently_accomplished(const World& w, const Vehicle& v);

bool is_terminal(const World& w);

/// Largest speed any vehicle can reach under this configuration.
double speed_bound(const World& w);

/// Canonical JSON snapshot of the full state (log excluded).
nlohmann::json snapshot(const World& w);

}  // namespace altruist::sim
