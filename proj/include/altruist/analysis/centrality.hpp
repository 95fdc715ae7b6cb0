#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "altruist/sim/event_log.hpp"
#include "altruist/sim/world.hpp"

namespace altruist::analysis {

inline constexpr double kLanePenalty = 5.0;      // m of travel distance per lane of lateral separation
inline constexpr double kProximityRadius = 60.0;  // m

struct VehiclePoint {
  int id = 0;
  double x = 0.0;
  int lateral = 0;
  double v = 0.0;
};

/// Positions of every vehicle on the road at one sample time.
struct TrafficFrame {
  double t = 0.0;
  std::vector<VehiclePoint> vehicles;
};

/// Non-departed vehicles of a live world.
TrafficFrame frame_from_world(const sim::World& w);

/// Groups `State` events by step into frames, mapping lane ids to lateral
/// slots through `layout`. Frames come out in step order.
std::vector<TrafficFrame> frames_from_events(const std::vector<sim::Event>& events, const sim::RoadLayout& layout);

/// Complete graph over the vehicles of a frame, weighted by travel distance.
struct TrafficGraph {
  std::vector<int> ids;
  std::vector<double> dist;  // row-major n x n

  std::size_t size() const { return ids.size(); }
  double at(std::size_t k, std::size_t m) const { return dist[k * ids.size() + m]; }
  std::optional<std::size_t> index_of(int id) const;
};

double travel_distance(const VehiclePoint& a, const VehiclePoint& b, double lane_penalty = kLanePenalty);

TrafficGraph build_traffic_graph(const TrafficFrame& frame, double lane_penalty = kLanePenalty);
TrafficGraph build_traffic_graph(const sim::World& w);

/// (N-1) / sum of distances from vertex k. Empty with fewer than two vertices
/// or when every other vehicle sits on top of k.
std::optional<double> closeness_centrality(const TrafficGraph& g, std::size_t k);

/// Cumulative degree centrality. A vehicle m counts once for k, the first
/// time it is within `radius` of k while no faster than k.
class DegreeTracker {
 public:
  explicit DegreeTracker(double radius = kProximityRadius, double lane_penalty = kLanePenalty)
      : radius_(radius), lane_penalty_(lane_penalty) {}

  void update(const TrafficFrame& frame);
  double degree(int id) const;

 private:
  double radius_;
  double lane_penalty_;
  std::map<int, std::set<int>> counted_;
};

/// Closeness and degree samples of one vehicle. Closeness is NaN where it is
/// undefined (vehicle alone or absent).
struct CentralitySeries {
  int id = 0;
  std::vector<double> t;
  std::vector<double> closeness;
  std::vector<double> degree;
};

/// Runs the frames through a fresh tracker and records vehicle `id`. Frames
/// in which the vehicle is absent are skipped.
CentralitySeries centrality_series(const std::vector<TrafficFrame>& frames, int id,
                                   double radius = kProximityRadius, double lane_penalty = kLanePenalty);

/// Style likelihood estimates: absolute forward-difference derivatives of the
/// centralities, and their maxima.
struct Sle {
  std::vector<double> lateral;       // |dC_C/dt|
  std::vector<double> longitudinal;  // |dC_D/dt|
  double max_lateral = 0.0;
  double max_longitudinal = 0.0;
};

/// |x[i+1] - x[i]| / (t[i+1] - t[i]); NaN where either sample is NaN.
std::vector<double> abs_forward_difference(const std::vector<double>& t, const std::vector<double>& x);

/// Largest non-NaN value, 0 for an all-NaN or empty series.
double series_max(const std::vector<double>& x);

/// Maxima over consecutive windows of `samples` entries; the last window may be short.
std::vector<double> window_maxima(const std::vector<double>& x, std::size_t samples);

/// Throws std::invalid_argument for fewer than two samples.
Sle sle(const CentralitySeries& s);

}  // namespace altruist::analysis
