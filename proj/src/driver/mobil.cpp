#include "altruist/driver/mobil.hpp"

#include <limits>

#include "altruist/driver/idm.hpp"

namespace altruist::driver {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Acceleration of a vehicle at speed `v` with params `p` following `leader`.
// Unclipped: the safety criterion must see the braking a gap really demands.
double follow(double v, const BehaviorParams& p, const std::optional<Neighbor>& leader) {
  if (!leader) return idm_acceleration_unclipped(v, 0.0, kInf, p);
  return idm_acceleration_unclipped(v, v - leader->speed, leader->gap, p);
}

}  // namespace

LaneChangeAccelerations mobil_accelerations(const MobilNeighbors& n, const BehaviorParams& ego) {
  LaneChangeAccelerations acc;
  acc.ego_now = follow(n.ego_speed, ego, n.old_leader);
  acc.ego_after = follow(n.ego_speed, ego, n.new_leader);

  if (n.new_follower) {
    const Neighbor& f = *n.new_follower;
    // Before the change the new follower trails the new leader, across the ego's slot.
    std::optional<Neighbor> leader_now;
    if (n.new_leader) {
      leader_now = Neighbor{f.gap + n.ego_length + n.new_leader->gap, n.new_leader->speed, {}};
    }
    acc.new_follower_now = follow(f.speed, f.params, leader_now);
    acc.new_follower_after = follow(f.speed, f.params, Neighbor{f.gap, n.ego_speed, {}});
  }

  if (n.old_follower) {
    const Neighbor& f = *n.old_follower;
    acc.old_follower_now = follow(f.speed, f.params, Neighbor{f.gap, n.ego_speed, {}});
    std::optional<Neighbor> leader_after;
    if (n.old_leader) {
      leader_after = Neighbor{f.gap + n.ego_length + n.old_leader->gap, n.old_leader->speed, {}};
    }
    acc.old_follower_after = follow(f.speed, f.params, leader_after);
  }
  return acc;
}

bool mobil_safe(const LaneChangeAccelerations& acc, const BehaviorParams& p) {
  return acc.new_follower_after > -p.b_safe;
}

double mobil_incentive(const LaneChangeAccelerations& acc, const BehaviorParams& p) {
  double incentive = acc.ego_after - acc.ego_now;
  // Zero politeness drops the follower terms outright.
  if (p.politeness != 0.0) {
    incentive += p.politeness * ((acc.new_follower_after - acc.new_follower_now) +
                                 (acc.old_follower_after - acc.old_follower_now));
  }
  return incentive;
}

LaneDecision mobil_decide(const LaneChangeAccelerations& acc, const BehaviorParams& p) {
  if (!mobil_safe(acc, p)) return LaneDecision::Stay;
  return mobil_incentive(acc, p) > p.delta_a_th ? LaneDecision::Change : LaneDecision::Stay;
}

LaneDecision mobil_decide(const MobilNeighbors& n, const BehaviorParams& p) {
  return mobil_decide(mobil_accelerations(n, p), p);
}

}  // namespace altruist::driver
