#include "altruist/analysis/centrality.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace altruist::analysis {

TrafficFrame frame_from_world(const sim::World& w) {
  TrafficFrame f;
  f.t = w.t;
  for (const sim::Vehicle& v : w.vehicles) {
    if (v.departed) continue;
    f.vehicles.push_back({v.id, v.x, w.layout.lane(v.lane).lateral, v.v});
  }
  return f;
}

std::vector<TrafficFrame> frames_from_events(const std::vector<sim::Event>& events, const sim::RoadLayout& layout) {
  std::map<long, TrafficFrame> by_step;
  for (const sim::Event& e : events) {
    if (e.type != sim::EventType::State || e.vehicles.empty()) continue;
    TrafficFrame& f = by_step[e.step];
    f.t = e.t;
    f.vehicles.push_back({e.vehicles.front(), e.x, layout.lane(e.lane).lateral, e.v});
  }
  std::vector<TrafficFrame> frames;
  frames.reserve(by_step.size());
  for (auto& [step, f] : by_step) frames.push_back(std::move(f));
  return frames;
}

std::optional<std::size_t> TrafficGraph::index_of(int id) const {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == id) return i;
  }
  return std::nullopt;
}

double travel_distance(const VehiclePoint& a, const VehiclePoint& b, double lane_penalty) {
  return std::abs(a.x - b.x) + lane_penalty * std::abs(a.lateral - b.lateral);
}

TrafficGraph build_traffic_graph(const TrafficFrame& frame, double lane_penalty) {
  TrafficGraph g;
  const std::size_t n = frame.vehicles.size();
  g.ids.reserve(n);
  for (const VehiclePoint& p : frame.vehicles) g.ids.push_back(p.id);
  g.dist.assign(n * n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t m = k + 1; m < n; ++m) {
      const double d = travel_distance(frame.vehicles[k], frame.vehicles[m], lane_penalty);
      g.dist[k * n + m] = d;
      g.dist[m * n + k] = d;
    }
  }
  return g;
}

TrafficGraph build_traffic_graph(const sim::World& w) { return build_traffic_graph(frame_from_world(w)); }

std::optional<double> closeness_centrality(const TrafficGraph& g, std::size_t k) {
  const std::size_t n = g.size();
  if (n < 2 || k >= n) return std::nullopt;
  double sum = 0.0;
  for (std::size_t m = 0; m < n; ++m) sum += g.at(k, m);
  if (sum <= 0.0) return std::nullopt;
  return static_cast<double>(n - 1) / sum;
}

void DegreeTracker::update(const TrafficFrame& frame) {
  for (const VehiclePoint& k : frame.vehicles) {
    std::set<int>& seen = counted_[k.id];
    for (const VehiclePoint& m : frame.vehicles) {
      if (m.id == k.id || m.v > k.v || seen.contains(m.id)) continue;
      if (travel_distance(k, m, lane_penalty_) <= radius_) seen.insert(m.id);
    }
  }
}

double DegreeTracker::degree(int id) const {
  const auto it = counted_.find(id);
  return it == counted_.end() ? 0.0 : static_cast<double>(it->second.size());
}

CentralitySeries centrality_series(const std::vector<TrafficFrame>& frames, int id, double radius,
                                   double lane_penalty) {
  CentralitySeries s;
  s.id = id;
  DegreeTracker tracker(radius, lane_penalty);
  for (const TrafficFrame& f : frames) {
    tracker.update(f);
    const TrafficGraph g = build_traffic_graph(f, lane_penalty);
    const auto k = g.index_of(id);
    if (!k) continue;
    s.t.push_back(f.t);
    s.closeness.push_back(closeness_centrality(g, *k).value_or(std::numeric_limits<double>::quiet_NaN()));
    s.degree.push_back(tracker.degree(id));
  }
  return s;
}

std::vector<double> abs_forward_difference(const std::vector<double>& t, const std::vector<double>& x) {
  if (t.size() != x.size()) throw std::invalid_argument("time and value series differ in length");
  std::vector<double> d;
  if (x.size() < 2) return d;
  d.reserve(x.size() - 1);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double h = t[i + 1] - t[i];
    if (!(h > 0.0)) throw std::invalid_argument("sample times must increase");
    d.push_back(std::abs(x[i + 1] - x[i]) / h);  // NaN propagates
  }
  return d;
}

double series_max(const std::vector<double>& x) {
  double best = 0.0;
  for (double v : x) {
    if (!std::isnan(v) && v > best) best = v;
  }
  return best;
}

std::vector<double> window_maxima(const std::vector<double>& x, std::size_t samples) {
  if (samples == 0) throw std::invalid_argument("window must hold at least one sample");
  std::vector<double> out;
  for (std::size_t i = 0; i < x.size(); i += samples) {
    const std::size_t end = std::min(x.size(), i + samples);
    out.push_back(series_max(std::vector<double>(x.begin() + static_cast<long>(i), x.begin() + static_cast<long>(end))));
  }
  return out;
}

Sle sle(const CentralitySeries& s) {
  if (s.t.size() < 2) throw std::invalid_argument("SLE needs at least two samples");
  Sle r;
  r.lateral = abs_forward_difference(s.t, s.closeness);
  r.longitudinal = abs_forward_difference(s.t, s.degree);
  r.max_lateral = series_max(r.lateral);
  r.max_longitudinal = series_max(r.longitudinal);
  return r;
}

}  // namespace altruist::analysis
