#pragma once

#include <limits>
#include <optional>

#include "altruist/driver/behavior.hpp"

namespace altruist::driver {

enum class LaneDecision { Stay, Change };

/// Accelerations before and after the hypothetical lane change.
/// `new_follower_*` refer to the follower in the target lane,
/// `old_follower_*` to the follower in the current lane.
struct LaneChangeAccelerations {
  double ego_now = 0.0;
  double ego_after = 0.0;
  double new_follower_now = 0.0;
  double new_follower_after = 0.0;
  double old_follower_now = 0.0;
  double old_follower_after = 0.0;
};

/// Kinematic state of a neighbour relative to the ego. Gaps are bumper to
/// bumper and measured along the lane.
struct Neighbor {
  double gap = std::numeric_limits<double>::infinity();
  double speed = 0.0;
  BehaviorParams params{};
};

/// Neighbourhood of a candidate lane change. Missing neighbours behave as
/// virtual vehicles at infinite gap with zero approach rate.
struct MobilNeighbors {
  double ego_speed = 0.0;
  double ego_length = 5.0;
  std::optional<Neighbor> old_leader;
  std::optional<Neighbor> old_follower;
  std::optional<Neighbor> new_leader;
  std::optional<Neighbor> new_follower;
};

/// Evaluates the six IDM accelerations MOBIL compares.
LaneChangeAccelerations mobil_accelerations(const MobilNeighbors& n, const BehaviorParams& ego);

/// Safety criterion: the new follower decelerates less than b_safe.
bool mobil_safe(const LaneChangeAccelerations& acc, const BehaviorParams& p);

/// Politeness-weighted acceleration gain of the change (left side of the
/// incentive inequality).
double mobil_incentive(const LaneChangeAccelerations& acc, const BehaviorParams& p);

/// Discretionary decision: Change iff the safety and incentive criteria both hold.
LaneDecision mobil_decide(const LaneChangeAccelerations& acc, const BehaviorParams& p);

/// Convenience overload computing the accelerations first.
LaneDecision mobil_decide(const MobilNeighbors& n, const BehaviorParams& p);

}  // namespace altruist::driver
