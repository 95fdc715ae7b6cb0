#include "altruist/harness/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace altruist::harness {
namespace {

// Mean and standard error of the mean, summed in index order.
std::pair<double, double> mean_stderr(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double sum = 0.0;
  for (double v : x) sum += v;
  const double mean = sum / n;
  if (x.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

Aggregate aggregate(const std::vector<EpisodeMetrics>& episodes) {
  if (episodes.empty()) throw std::invalid_argument("aggregate needs at least one episode");
  Aggregate a;
  a.episodes = static_cast<int>(episodes.size());
  std::vector<double> dt, rew;
  double interventions = 0.0;
  for (const EpisodeMetrics& e : episodes) {
    a.crashes += e.crashed;
    if (e.has_mission) {
      ++a.mission_episodes;
      a.mission_failures += e.mission_failed;
    }
    dt.push_back(e.distance_traveled);
    rew.push_back(e.reward_sum);
    interventions += e.interventions;
  }
  a.crash_pct = 100.0 * a.crashes / a.episodes;
  a.mission_fail_pct = a.mission_episodes > 0 ? 100.0 * a.mission_failures / a.mission_episodes : 0.0;
  std::tie(a.dt_mean, a.dt_stderr) = mean_stderr(dt);
  std::tie(a.reward_mean, a.reward_stderr) = mean_stderr(rew);
  a.interventions_mean = interventions / a.episodes;
  return a;
}

double pg_safety(double crash_egoistic, double crash_social, int n_episodes) {
  if (n_episodes < 1) throw std::invalid_argument("pg_safety needs a positive episode count");
  if (crash_egoistic < 0.0 || crash_egoistic > 100.0 || crash_social < 0.0 || crash_social > 100.0) {
    throw std::invalid_argument("crash rates must be percentages");
  }
  return (crash_egoistic - crash_social) / n_episodes;
}

std::optional<double> pg_efficiency(double dt_social, double dt_egoistic) {
  if (!(dt_egoistic > 0.0)) return std::nullopt;
  return 100.0 * (dt_social - dt_egoistic) / dt_egoistic;
}

double adaptation_error(double crash_pct, double dt, double dt_max, double w_s, double w_e) {
  if (!(dt_max > 0.0)) throw std::invalid_argument("dt_max must be positive");
  if (std::abs(w_s + w_e - 1.0) > 1e-12) throw std::invalid_argument("adaptation weights must sum to 1");
  if (dt < 0.0 || dt > dt_max) throw std::invalid_argument("dt outside [0, dt_max]");
  return w_s * crash_pct + w_e * 100.0 * (1.0 - dt / dt_max);
}

}  // namespace altruist::harness
