#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace altruist::harness {

struct EpisodeMetrics {
  std::uint64_t seed = 0;
  bool crashed = false;          // collision involving an AV or the mission vehicle
  bool has_mission = false;
  bool mission_failed = false;   // mission vehicle present and not accomplished
  double distance_traveled = 0;  // mean over AVs (m)
  double reward_sum = 0;         // mean over AVs of the summed per-tick rewards
  int interventions = 0;         // safety-filter interventions, all AVs
  long steps = 0;

  friend bool operator==(const EpisodeMetrics&, const EpisodeMetrics&) = default;
};

struct Aggregate {
  int episodes = 0;
  int crashes = 0;
  int mission_episodes = 0;
  int mission_failures = 0;
  double crash_pct = 0;
  double mission_fail_pct = 0;  // over episodes with a mission vehicle; 0 when there are none
  double dt_mean = 0;
  double dt_stderr = 0;
  double reward_mean = 0;
  double reward_stderr = 0;
  double interventions_mean = 0;

  friend bool operator==(const Aggregate&, const Aggregate&) = default;
};

/// Throws std::invalid_argument for an empty list.
Aggregate aggregate(const std::vector<EpisodeMetrics>& episodes);

/// (C_E - C_S) / N, crash rates in percent.
double pg_safety(double crash_egoistic, double crash_social, int n_episodes);

/// 100 (DT_S - DT_E) / DT_E; empty when DT_E is not positive.
std::optional<double> pg_efficiency(double dt_social, double dt_egoistic);

inline constexpr double kSafetyWeight = 2.0 / 3.0;
inline constexpr double kEfficiencyWeight = 1.0 / 3.0;

/// w_s C + w_e 100 (1 - dt / dt_max). Throws std::invalid_argument when
/// dt_max <= 0, the weights do not sum to one, or dt lies outside [0, dt_max].
double adaptation_error(double crash_pct, double dt, double dt_max, double w_s = kSafetyWeight,
                        double w_e = kEfficiencyWeight);

}  // namespace altruist::harness
