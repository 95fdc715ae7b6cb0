#include "altruist/obs/velocity_map.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <ostream>
#include <stdexcept>
#include <string>

namespace altruist::obs {
namespace {

// Half-open range of grid cells [first, last) touched by a longitudinal interval.
std::pair<int, int> row_span(double lo, double hi, const GridSpec& g) {
  const double cell = g.extent / g.rows;
  const double origin = -0.5 * g.extent;
  int first = static_cast<int>(std::floor((lo - origin) / cell));
  int last = static_cast<int>(std::ceil((hi - origin) / cell));
  return {std::clamp(first, 0, g.rows), std::clamp(last, 0, g.rows)};
}

std::pair<int, int> col_span(int slot, int slots, const GridSpec& g) {
  return {slot * g.cols / slots, (slot + 1) * g.cols / slots};
}

void paint(Observation& o, int channel, std::pair<int, int> rows, std::pair<int, int> cols, float value) {
  for (int r = rows.first; r < rows.second; ++r) {
    for (int c = cols.first; c < cols.second; ++c) {
      float& px = o.at(channel, r, c);
      px = std::max(px, value);
    }
  }
}

void write_header(std::ostream& out, const std::string& shape) {
  out << "VELOCITYMAP float32 le\nshape " << shape << "\nchannels";
  for (auto name : kChannelNames) out << ' ' << name;
  out << "\n\n";
}

void write_floats(std::ostream& out, const std::vector<float>& data) {
  for (float f : data) {
    std::uint32_t bits = std::bit_cast<std::uint32_t>(f);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
    out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
  }
}

}  // namespace

void GridSpec::validate() const {
  if (rows <= 0 || cols <= 0 || !(extent > 0.0) || history < 1 || pool_rows < 1 || pool_cols < 1) {
    throw std::invalid_argument("grid spec: sizes must be positive");
  }
  if (rows % pool_rows != 0 || cols % pool_cols != 0) {
    throw std::invalid_argument("grid spec: pooling must divide the grid");
  }
  if (!(s0 > 0.0) || !(v_clip > 0.0) || !(perception > 0.0)) {
    throw std::invalid_argument("grid spec: speed map constants and perception must be positive");
  }
}

void to_json(nlohmann::json& j, const GridSpec& g) {
  j = nlohmann::json{{"rows", g.rows},           {"cols", g.cols},         {"extent", g.extent},
                     {"perception", g.perception}, {"s0", g.s0},             {"v_clip", g.v_clip},
                     {"history", g.history},     {"pool_rows", g.pool_rows}, {"pool_cols", g.pool_cols}};
}

void from_json(const nlohmann::json& j, GridSpec& g) {
  GridSpec d;
  g.rows = j.value("rows", d.rows);
  g.cols = j.value("cols", d.cols);
  g.extent = j.value("extent", d.extent);
  g.perception = j.value("perception", d.perception);
  g.s0 = j.value("s0", d.s0);
  g.v_clip = j.value("v_clip", d.v_clip);
  g.history = j.value("history", d.history);
  g.pool_rows = j.value("pool_rows", d.pool_rows);
  g.pool_cols = j.value("pool_cols", d.pool_cols);
  g.validate();
}

double speed_to_pixel(double rel_v, double s0, double v_clip) {
  if (rel_v == 0.0) return 0.5;
  const double mag = std::min(1.0, std::log1p(std::abs(rel_v) / s0) / std::log1p(v_clip / s0));
  const double p = 0.5 + 0.5 * (rel_v > 0.0 ? mag : -mag);
  return std::clamp(p, 0.0, 1.0);
}

Observation render_velocity_map(const sim::World& w, int ego_id, const GridSpec& g) {
  const sim::Vehicle* ego = w.find(ego_id);
  if (ego == nullptr || !ego->is_av()) throw std::invalid_argument("render: unknown ego " + std::to_string(ego_id));

  Observation o;
  o.ego_id = ego_id;
  o.t = w.t;
  o.rows = g.rows;
  o.cols = g.cols;
  o.data.assign(static_cast<std::size_t>(kChannels) * g.rows * g.cols, 0.0f);

  const int min_lat = w.layout.min_lateral();
  const int slots = w.layout.lateral_slots();
  auto cols_of_lane = [&](int lane_id) { return col_span(w.layout.lane(lane_id).lateral - min_lat, slots, g); };

  // Road: through lanes 1.0, ramps 0.5, sampled at each row's centre.
  const double cell = g.extent / g.rows;
  for (int r = 0; r < g.rows; ++r) {
    const double x = ego->x - 0.5 * g.extent + (r + 0.5) * cell;
    for (const sim::Lane& lane : w.layout.lanes()) {
      if (!lane.covers(x)) continue;
      const float value = lane.kind == sim::LaneKind::Through ? 1.0f : 0.5f;
      paint(o, kRoadChannel, {r, r + 1}, cols_of_lane(lane.id), value);
    }
  }

  for (const sim::Vehicle& v : w.vehicles) {
    if (v.departed) continue;
    const double dx = v.x - ego->x;
    if (std::abs(dx) > g.perception) continue;
    const auto rows = row_span(dx - 0.5 * v.length, dx + 0.5 * v.length, g);
    const auto cols = cols_of_lane(v.lane);
    const float px = static_cast<float>(speed_to_pixel(v.v - ego->v, g.s0, g.v_clip));
    int channel = v.is_av() ? kAvChannel : kHvChannel;
    if (v.id == w.mission_vehicle_id) channel = kMissionChannel;
    paint(o, channel, rows, cols, px);
    if (v.id == ego_id) paint(o, kEgoChannel, rows, cols, 1.0f);
  }
  return o;
}

StackedState stack_history(const StackedState& prev, const Observation& obs, int history) {
  if (history < 1) throw std::invalid_argument("history length must be positive");
  if (!prev.frames.empty() && prev.ego_id != obs.ego_id) {
    throw std::invalid_argument("stack_history: observation belongs to a different ego");
  }
  StackedState next = prev;
  next.ego_id = obs.ego_id;
  if (next.frames.empty()) {
    next.frames.assign(static_cast<std::size_t>(history), obs);
    return next;
  }
  next.frames.push_back(obs);
  while (static_cast<int>(next.frames.size()) > history) next.frames.pop_front();
  return next;
}

std::vector<float> flatten(const StackedState& s, const GridSpec& g) {
  if (static_cast<int>(s.frames.size()) != g.history) {
    throw std::invalid_argument("flatten: stack length does not match the grid history");
  }
  const int pr = g.pooled_rows();
  const int pc = g.pooled_cols();
  const float scale = 1.0f / static_cast<float>(g.pool_rows * g.pool_cols);
  std::vector<float> out;
  out.reserve(static_cast<std::size_t>(g.input_size()));
  for (const Observation& o : s.frames) {
    if (o.rows != g.rows || o.cols != g.cols) throw std::invalid_argument("flatten: frame shape mismatch");
    for (int ch = 0; ch < kChannels; ++ch) {
      for (int r = 0; r < pr; ++r) {
        for (int c = 0; c < pc; ++c) {
          float sum = 0.0f;
          for (int dr = 0; dr < g.pool_rows; ++dr) {
            for (int dc = 0; dc < g.pool_cols; ++dc) sum += o.at(ch, r * g.pool_rows + dr, c * g.pool_cols + dc);
          }
          out.push_back(sum * scale);
        }
      }
    }
  }
  return out;
}

void write_tensor(std::ostream& out, const Observation& obs) {
  write_header(out, std::to_string(kChannels) + " " + std::to_string(obs.rows) + " " + std::to_string(obs.cols));
  write_floats(out, obs.data);
}

void write_tensor(std::ostream& out, const StackedState& s) {
  if (s.frames.empty()) throw std::invalid_argument("write_tensor: empty stack");
  const Observation& f = s.frames.front();
  write_header(out, std::to_string(s.frames.size()) + " " + std::to_string(kChannels) + " " + std::to_string(f.rows) +
                        " " + std::to_string(f.cols));
  for (const Observation& o : s.frames) write_floats(out, o.data);
}

}  // namespace altruist::obs
