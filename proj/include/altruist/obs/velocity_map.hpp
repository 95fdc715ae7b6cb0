#pragma once

#include <array>
#include <deque>
#include <iosfwd>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "altruist/sim/world.hpp"

namespace altruist::obs {

inline constexpr int kChannels = 5;
enum Channel : int { kAvChannel = 0, kHvChannel = 1, kMissionChannel = 2, kEgoChannel = 3, kRoadChannel = 4 };
inline constexpr std::array<std::string_view, kChannels> kChannelNames = {"av", "hv", "mission", "ego", "road"};

struct GridSpec {
  int rows = 64;          // longitudinal cells
  int cols = 16;          // lateral cells spread over all lane slots
  double extent = 120.0;  // longitudinal window (m), centred on the ego
  double perception = 60.0;
  double s0 = 2.0;        // log-map knee (m/s)
  double v_clip = 20.0;   // relative speed mapped to 0 or 1 (m/s)
  int history = 4;
  int pool_rows = 4;      // average pooling applied before the learner
  int pool_cols = 4;

  void validate() const;
  int pooled_rows() const { return rows / pool_rows; }
  int pooled_cols() const { return cols / pool_cols; }
  /// Length of the flattened, pooled stack fed to the Q-function.
  int input_size() const { return history * kChannels * pooled_rows() * pooled_cols(); }
};

void to_json(nlohmann::json& j, const GridSpec& g);
void from_json(const nlohmann::json& j, GridSpec& g);

/// One VelocityMap frame: channel-major, then longitudinal row, then lateral column.
struct Observation {
  int ego_id = -1;
  double t = 0.0;
  int rows = 0;
  int cols = 0;
  std::vector<float> data;

  float at(int channel, int row, int col) const {
    return data[(static_cast<std::size_t>(channel) * rows + row) * cols + col];
  }
  float& at(int channel, int row, int col) {
    return data[(static_cast<std::size_t>(channel) * rows + row) * cols + col];
  }
  friend bool operator==(const Observation&, const Observation&) = default;
};

/// Clipped logarithmic relative-speed encoding, 0.5 at equal speed.
double speed_to_pixel(double rel_v, double s0 = 2.0, double v_clip = 20.0);

/// Renders the ego-centred map. Throws std::invalid_argument when `ego_id`
/// is not an AV of the world.
Observation render_velocity_map(const sim::World& w, int ego_id, const GridSpec& g);

/// Last K frames, oldest first.
struct StackedState {
  int ego_id = -1;
  std::deque<Observation> frames;
  friend bool operator==(const StackedState&, const StackedState&) = default;
};

/// Appends `obs`, dropping the oldest frame; an empty history is padded with
/// K copies of the first frame. Throws std::invalid_argument on ego mismatch.
StackedState stack_history(const StackedState& prev, const Observation& obs, int history);

/// Average-pooled, flattened stack (the learner input).
std::vector<float> flatten(const StackedState& s, const GridSpec& g);

/// Raw tensor export: a short text header followed by little-endian float32 data.
void write_tensor(std::ostream& out, const Observation& obs);
void write_tensor(std::ostream& out, const StackedState& s);

}  // namespace altruist::obs
