#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>

#include "altruist/driver/behavior.hpp"

namespace altruist::sim {

enum class VehicleKind { AV, HV };
enum class Mission { None, Merge, Exit };
enum class MissionStatus { Pending, Accomplished, Failed };

/// High-level decision of an autonomous vehicle.
enum class MetaAction : std::uint8_t { ChangeRight = 0, ChangeLeft = 1, Accelerate = 2, Decelerate = 3, Idle = 4 };

inline constexpr int kActionCount = 5;
inline constexpr std::array<MetaAction, kActionCount> kAllActions = {
    MetaAction::ChangeRight, MetaAction::ChangeLeft, MetaAction::Accelerate, MetaAction::Decelerate,
    MetaAction::Idle};

constexpr int action_index(MetaAction a) { return static_cast<int>(a); }
/// Throws std::out_of_range outside [0, 5).
MetaAction action_from_index(int index);

std::string_view to_string(MetaAction a);
std::string_view to_string(VehicleKind k);
std::string_view to_string(Mission m);
std::string_view to_string(MissionStatus s);

inline constexpr int kNoLane = std::numeric_limits<int>::min();

struct Vehicle {
  int id = 0;
  VehicleKind kind = VehicleKind::HV;
  Mission mission = Mission::None;

  double x = 0.0;  // longitudinal position of the vehicle centre (m)
  int lane = 0;
  double v = 0.0;
  double a = 0.0;
  double length = 5.0;
  double width = 2.0;

  driver::BehaviorParams behavior{};  // HVs only
  double svo_phi = 0.0;               // AVs only, radians in [0, pi/2]

  bool crashed = false;
  bool departed = false;
  bool scripted = false;  // HV that holds its speed and lane regardless of traffic

  // AV controller state.
  double target_speed = 0.0;

  // Lane vacated during the current dt step; a vehicle occupies both lanes
  // for the step in which it changes.
  int vacated_lane = kNoLane;
  double last_lane_change_t = -std::numeric_limits<double>::infinity();

  // Per decision tick bookkeeping used by the reward.
  int lane_changes_in_tick = 0;
  bool crashed_in_tick = false;

  MissionStatus mission_status = MissionStatus::Pending;
  double mission_resolved_t = std::numeric_limits<double>::quiet_NaN();

  double distance_traveled = 0.0;

  bool alive() const { return !crashed && !departed; }
  bool is_av() const { return kind == VehicleKind::AV; }
  double rear() const { return x - 0.5 * length; }
  double front() const { return x + 0.5 * length; }
};

/// Bumper-to-bumper gap from `rear` to `front` (negative when they overlap).
inline double bumper_gap(const Vehicle& rear, const Vehicle& front) {
  return (front.x - rear.x) - 0.5 * (front.length + rear.length);
}

}  // namespace altruist::sim
