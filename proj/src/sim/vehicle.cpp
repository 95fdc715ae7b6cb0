#include "altruist/sim/vehicle.hpp"

#include <stdexcept>
#include <string>

namespace altruist::sim {

MetaAction action_from_index(int index) {
  if (index < 0 || index >= kActionCount) throw std::out_of_range("meta-action index " + std::to_string(index));
  return kAllActions[static_cast<std::size_t>(index)];
}

std::string_view to_string(MetaAction a) {
  switch (a) {
    case MetaAction::ChangeRight: return "change_right";
    case MetaAction::ChangeLeft: return "change_left";
    case MetaAction::Accelerate: return "accelerate";
    case MetaAction::Decelerate: return "decelerate";
    case MetaAction::Idle: return "idle";
  }
  return "idle";
}

std::string_view to_string(VehicleKind k) { return k == VehicleKind::AV ? "av" : "hv"; }

std::string_view to_string(Mission m) {
  switch (m) {
    case Mission::None: return "none";
    case Mission::Merge: return "merge";
    case Mission::Exit: return "exit";
  }
  return "none";
}

std::string_view to_string(MissionStatus s) {
  switch (s) {
    case MissionStatus::Pending: return "pending";
    case MissionStatus::Accomplished: return "accomplished";
    case MissionStatus::Failed: return "failed";
  }
  return "pending";
}

}  // namespace altruist::sim
