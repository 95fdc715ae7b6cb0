#pragma once

#include <cmath>
#include <iosfwd>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace altruist::sim {

enum class EventType { Collision, LaneChange, MissionAccomplished, MissionFailed, Departed, State, SafetyMask };

std::string_view to_string(EventType t);
EventType event_type_from_string(std::string_view name);

/// One entry of the per-episode event log. `State` events carry a full
/// kinematic snapshot of one vehicle and are only recorded when trajectory
/// logging is enabled; `SafetyMask` events record prioritizer decisions.
struct Event {
  long step = 0;
  double t = 0.0;
  EventType type = EventType::State;
  std::vector<int> vehicles;
  double x = 0.0;
  int lane = 0;
  double v = std::nan("");
  int from_lane = 0;       // LaneChange only
  int action = -1;         // SafetyMask only
  double score = std::nan("");
  bool masked = false;

  friend bool operator==(const Event&, const Event&) = default;
};

nlohmann::json to_json(const Event& e);
Event event_from_json(const nlohmann::json& j);

class EventLog {
 public:
  void append(Event e) { events_.push_back(std::move(e)); }
  const std::vector<Event>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  void clear() { events_.clear(); }

  bool record_states = false;
  bool record_masks = false;

  void write_jsonl(std::ostream& out) const;
  static std::vector<Event> read_jsonl(std::istream& in);

 private:
  std::vector<Event> events_;
};

}  // namespace altruist::sim
