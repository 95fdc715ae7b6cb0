#pragma once

#include "altruist/sim/world.hpp"

namespace testsupport {

using namespace altruist;

inline sim::World straight_world(int lanes = 3, double length = 2000.0) {
  sim::World w;
  w.layout = sim::RoadLayout::straight(lanes, length);
  return w;
}

/// Appends a vehicle with id = index. AVs get target_speed = v.
inline sim::Vehicle& add_vehicle(sim::World& w, sim::VehicleKind kind, int lane, double x, double v,
                                 driver::BehaviorParams p = driver::moderate_params()) {
  sim::Vehicle veh;
  veh.id = static_cast<int>(w.vehicles.size());
  veh.kind = kind;
  veh.lane = lane;
  veh.x = x;
  veh.v = v;
  veh.target_speed = v;
  veh.behavior = p;
  w.vehicles.push_back(veh);
  return w.vehicles.back();
}

inline sim::Vehicle& add_av(sim::World& w, int lane, double x, double v) {
  return add_vehicle(w, sim::VehicleKind::AV, lane, x, v);
}

inline sim::Vehicle& add_hv(sim::World& w, int lane, double x, double v,
                            driver::BehaviorParams p = driver::moderate_params()) {
  return add_vehicle(w, sim::VehicleKind::HV, lane, x, v, p);
}

/// HV that keeps its speed and lane.
inline sim::Vehicle& add_scripted(sim::World& w, int lane, double x, double v) {
  sim::Vehicle& veh = add_hv(w, lane, x, v);
  veh.scripted = true;
  return veh;
}

}  // namespace testsupport
