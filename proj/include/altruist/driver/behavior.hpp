#pragma once

#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace altruist::driver {

enum class BehaviorLabel { Aggressive, Moderate, Conservative, Custom };

std::string_view to_string(BehaviorLabel label);
BehaviorLabel behavior_label_from_string(std::string_view name);

/// IDM + MOBIL parameter bundle describing one human driver.
///
/// The MOBIL politeness factor doubles as the driver's social value
/// orientation (sin of the SVO angle).
struct BehaviorParams {
  double v0 = 30.0;          // desired speed (m/s)
  double time_gap = 1.5;     // safe time gap T0 (s)
  double min_gap = 2.0;      // minimum distance d0 (m)
  double a_max = 1.0;        // comfortable max acceleration (m/s^2)
  double a_des = 1.5;        // comfortable deceleration (m/s^2)
  double delta = 4.0;        // acceleration exponent
  double politeness = 0.5;   // sin(phi_ego), in [0, 1]
  double delta_a_th = 0.1;   // lane-change incentive threshold (m/s^2)
  double b_safe = 4.0;       // safe deceleration limit (m/s^2)
  BehaviorLabel label = BehaviorLabel::Custom;

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;

  friend bool operator==(const BehaviorParams&, const BehaviorParams&) = default;
};

/// Textbook IDM values with the typical MOBIL triple.
BehaviorParams typical_params();
BehaviorParams aggressive_params();
BehaviorParams moderate_params();
BehaviorParams conservative_params();
BehaviorParams preset(BehaviorLabel label);

/// Linear interpolation of every numeric field; t=0 gives `from`, t=1 gives `to`.
BehaviorParams interpolate(const BehaviorParams& from, const BehaviorParams& to, double t);

void to_json(nlohmann::json& j, const BehaviorParams& p);
void from_json(const nlohmann::json& j, BehaviorParams& p);

/// Weighted categorical distribution over parameter bundles.
class BehaviorMix {
 public:
  BehaviorMix() = default;
  BehaviorMix(std::vector<std::pair<BehaviorParams, double>> entries);

  static BehaviorMix point(const BehaviorParams& p);
  /// Equal weights over the aggressive, moderate and conservative presets.
  static BehaviorMix uniform_presets();

  const std::vector<std::pair<BehaviorParams, double>>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

 private:
  std::vector<std::pair<BehaviorParams, double>> entries_;
};

/// Draws one bundle. Throws std::invalid_argument on an empty or all-zero mix.
BehaviorParams sample_behavior(const BehaviorMix& mix, std::mt19937_64& rng);

}  // namespace altruist::driver
