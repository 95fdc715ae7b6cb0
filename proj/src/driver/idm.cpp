#include "altruist/driver/idm.hpp"

#include <algorithm>
#include <cmath>

namespace altruist::driver {

double idm_desired_gap(double v, double delta_v, const BehaviorParams& p) {
  const double dynamic = v * p.time_gap + v * delta_v / (2.0 * std::sqrt(p.a_max * p.a_des));
  return p.min_gap + std::max(0.0, dynamic);
}

double idm_acceleration_unclipped(double v, double delta_v, double gap, const BehaviorParams& p) {
  const double free_term = std::pow(std::max(v, 0.0) / p.v0, p.delta);
  double interaction = 0.0;
  if (std::isfinite(gap)) {
    const double d = std::max(gap, kMinGap);
    const double ratio = idm_desired_gap(v, delta_v, p) / d;
    interaction = ratio * ratio;
  }
  return p.a_max * (1.0 - free_term - interaction);
}

double idm_acceleration(double v, double delta_v, double gap, const BehaviorParams& p) {
  return std::clamp(idm_acceleration_unclipped(v, delta_v, gap, p), -2.0 * p.a_des, p.a_max);
}

}  // namespace altruist::driver
