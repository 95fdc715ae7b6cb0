#include "altruist/sim/road_layout.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <stdexcept>
#include <string>

namespace altruist::sim {

RoadLayout::RoadLayout(std::vector<Lane> lanes, std::vector<Ramp> ramps, double length)
    : lanes_(std::move(lanes)), ramps_(std::move(ramps)), length_(length) {
  if (!(length_ > 0.0)) throw std::invalid_argument("road length must be positive");
  std::set<int> ids;
  int through = 0;
  for (const Lane& l : lanes_) {
    if (!ids.insert(l.id).second) {
      throw std::invalid_argument("duplicate lane id " + std::to_string(l.id));
    }
    if (l.x_begin < 0.0 || l.x_end > length_ || l.x_begin >= l.x_end) {
      throw std::invalid_argument("lane " + std::to_string(l.id) + " extent outside the road");
    }
    if (l.kind == LaneKind::Through) ++through;
  }
  if (through < 2) throw std::invalid_argument("a road needs at least 2 through lanes");
  for (const Ramp& r : ramps_) {
    const Lane* l = find_lane(r.lane_id);
    if (l == nullptr || l->kind != r.kind) {
      throw std::invalid_argument("ramp refers to a missing or mismatched lane");
    }
    if (r.junction_begin < 0.0 || r.junction_end > length_ || r.junction_begin >= r.junction_end) {
      throw std::invalid_argument("ramp junction outside [0, length]");
    }
  }
}

RoadLayout RoadLayout::straight(int through_lanes, double length) {
  std::vector<Lane> lanes;
  for (int i = 0; i < through_lanes; ++i) lanes.push_back({i, i, 0.0, length, LaneKind::Through});
  return RoadLayout(std::move(lanes), {}, length);
}

const Lane* RoadLayout::find_lane(int id) const {
  for (const Lane& l : lanes_) {
    if (l.id == id) return &l;
  }
  return nullptr;
}

const Lane& RoadLayout::lane(int id) const {
  const Lane* l = find_lane(id);
  if (l == nullptr) throw std::out_of_range("unknown lane id " + std::to_string(id));
  return *l;
}

bool RoadLayout::lane_exists_at(int id, double x) const {
  const Lane* l = find_lane(id);
  return l != nullptr && l->covers(x);
}

bool RoadLayout::is_through(int id) const {
  const Lane* l = find_lane(id);
  return l != nullptr && l->kind == LaneKind::Through;
}

int RoadLayout::through_lane_count() const {
  return static_cast<int>(std::count_if(lanes_.begin(), lanes_.end(),
                                        [](const Lane& l) { return l.kind == LaneKind::Through; }));
}

const Ramp* RoadLayout::merge_ramp() const {
  for (const Ramp& r : ramps_) {
    if (r.kind == LaneKind::MergeRamp) return &r;
  }
  return nullptr;
}

const Ramp* RoadLayout::exit_ramp() const {
  for (const Ramp& r : ramps_) {
    if (r.kind == LaneKind::ExitRamp) return &r;
  }
  return nullptr;
}

const Ramp* RoadLayout::ramp_for_lane(int lane_id) const {
  for (const Ramp& r : ramps_) {
    if (r.lane_id == lane_id) return &r;
  }
  return nullptr;
}

std::optional<int> RoadLayout::through_lane_at(int lateral) const {
  for (const Lane& l : lanes_) {
    if (l.kind == LaneKind::Through && l.lateral == lateral) return l.id;
  }
  return std::nullopt;
}

int RoadLayout::min_lateral() const {
  int m = 0;
  for (const Lane& l : lanes_) m = std::min(m, l.lateral);
  return m;
}

int RoadLayout::max_lateral() const {
  int m = 0;
  for (const Lane& l : lanes_) m = std::max(m, l.lateral);
  return m;
}

bool RoadLayout::lane_change_allowed(int from, int to, double x) const {
  const Lane* a = find_lane(from);
  const Lane* b = find_lane(to);
  if (a == nullptr || b == nullptr || std::abs(a->lateral - b->lateral) != 1) return false;
  if (!b->covers(x)) return false;
  if (a->kind == LaneKind::Through && b->kind == LaneKind::Through) return true;
  const Ramp* ramp = ramp_for_lane(a->kind == LaneKind::Through ? b->id : a->id);
  return ramp != nullptr && x >= ramp->junction_begin && x < ramp->junction_end;
}

void to_json(nlohmann::json& j, const RoadLayout& layout) {
  auto kind_name = [](LaneKind k) {
    switch (k) {
      case LaneKind::Through: return "through";
      case LaneKind::MergeRamp: return "merge_ramp";
      case LaneKind::ExitRamp: return "exit_ramp";
    }
    return "through";
  };
  j = nlohmann::json::object();
  j["length"] = layout.length();
  for (const Lane& l : layout.lanes()) {
    j["lanes"].push_back({{"id", l.id}, {"lateral", l.lateral}, {"x_begin", l.x_begin},
                          {"x_end", l.x_end}, {"kind", kind_name(l.kind)}});
  }
  for (const Ramp& r : layout.ramps()) {
    j["ramps"].push_back({{"lane", r.lane_id}, {"kind", kind_name(r.kind)},
                          {"junction_begin", r.junction_begin}, {"junction_end", r.junction_end}});
  }
}

}  // namespace altruist::sim
