#include "altruist/sim/event_log.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace altruist::sim {

std::string_view to_string(EventType t) {
  switch (t) {
    case EventType::Collision: return "collision";
    case EventType::LaneChange: return "lane_change";
    case EventType::MissionAccomplished: return "mission_accomplished";
    case EventType::MissionFailed: return "mission_failed";
    case EventType::Departed: return "departed";
    case EventType::State: return "state";
    case EventType::SafetyMask: return "safety_mask";
  }
  return "state";
}

EventType event_type_from_string(std::string_view name) {
  for (EventType t : {EventType::Collision, EventType::LaneChange, EventType::MissionAccomplished,
                      EventType::MissionFailed, EventType::Departed, EventType::State, EventType::SafetyMask}) {
    if (to_string(t) == name) return t;
  }
  throw std::invalid_argument("unknown event type: " + std::string(name));
}

nlohmann::json to_json(const Event& e) {
  nlohmann::json j;
  j["step"] = e.step;
  j["t"] = e.t;
  j["type"] = std::string(to_string(e.type));
  j["vehicles"] = e.vehicles;
  j["x"] = e.x;
  j["lane"] = e.lane;
  if (!std::isnan(e.v)) j["v"] = e.v;
  if (e.type == EventType::LaneChange) j["from_lane"] = e.from_lane;
  if (e.type == EventType::SafetyMask) {
    j["action"] = e.action;
    j["score"] = e.score;
    j["masked"] = e.masked;
  }
  return j;
}

Event event_from_json(const nlohmann::json& j) {
  Event e;
  e.step = j.at("step").get<long>();
  e.t = j.at("t").get<double>();
  e.type = event_type_from_string(j.at("type").get<std::string>());
  e.vehicles = j.at("vehicles").get<std::vector<int>>();
  e.x = j.at("x").get<double>();
  e.lane = j.at("lane").get<int>();
  if (j.contains("v")) e.v = j.at("v").get<double>();
  e.from_lane = j.value("from_lane", 0);
  e.action = j.value("action", -1);
  if (j.contains("score")) e.score = j.at("score").get<double>();
  e.masked = j.value("masked", false);
  return e;
}

void EventLog::write_jsonl(std::ostream& out) const {
  for (const Event& e : events_) out << to_json(e).dump() << '\n';
}

std::vector<Event> EventLog::read_jsonl(std::istream& in) {
  std::vector<Event> events;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    events.push_back(event_from_json(nlohmann::json::parse(line)));
  }
  return events;
}

}  // namespace altruist::sim
