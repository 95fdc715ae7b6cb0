#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

namespace altruist::sim {

enum class LaneKind { Through, MergeRamp, ExitRamp };

struct Lane {
  int id = 0;
  int lateral = 0;  // 0 is the rightmost through lane, ramps sit at -1
  double x_begin = 0.0;
  double x_end = 0.0;
  LaneKind kind = LaneKind::Through;

  bool covers(double x) const { return x >= x_begin && x <= x_end; }
};

/// Junction between a ramp lane and the rightmost through lane. Lane changes
/// across the junction are only possible for x in [begin, end).
struct Ramp {
  LaneKind kind = LaneKind::MergeRamp;
  int lane_id = -1;
  double junction_begin = 0.0;
  double junction_end = 0.0;
};

class RoadLayout {
 public:
  RoadLayout() = default;
  /// Validates the invariants; throws std::invalid_argument on violation.
  RoadLayout(std::vector<Lane> lanes, std::vector<Ramp> ramps, double length);

  /// Straight highway with `through_lanes` lanes and no ramps.
  static RoadLayout straight(int through_lanes, double length);

  const std::vector<Lane>& lanes() const { return lanes_; }
  const std::vector<Ramp>& ramps() const { return ramps_; }
  double length() const { return length_; }

  const Lane* find_lane(int id) const;
  const Lane& lane(int id) const;
  bool has_lane(int id) const { return find_lane(id) != nullptr; }
  bool lane_exists_at(int id, double x) const;
  bool is_through(int id) const;
  int through_lane_count() const;

  const Ramp* merge_ramp() const;
  const Ramp* exit_ramp() const;
  const Ramp* ramp_for_lane(int lane_id) const;
  /// Id of the through lane at `lateral`, if any.
  std::optional<int> through_lane_at(int lateral) const;

  int min_lateral() const;
  int max_lateral() const;
  int lateral_slots() const { return max_lateral() - min_lateral() + 1; }

  /// Whether a vehicle at `x` may move from lane `from` to lane `to`.
  bool lane_change_allowed(int from, int to, double x) const;

  friend bool operator==(const RoadLayout&, const RoadLayout&) = default;

 private:
  std::vector<Lane> lanes_;
  std::vector<Ramp> ramps_;
  double length_ = 0.0;
};

void to_json(nlohmann::json& j, const RoadLayout& layout);

}  // namespace altruist::sim
