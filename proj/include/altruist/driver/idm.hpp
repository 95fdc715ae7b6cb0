#pragma once

#include "altruist/driver/behavior.hpp"

namespace altruist::driver {

/// Gap used in place of non-positive gaps so the interaction term stays finite
/// until the collision check flags the overlap.
inline constexpr double kMinGap = 0.1;

/// Desired dynamic gap d*(v, dv). The velocity-dependent part is floored at
/// zero so d* never drops below d0.
double idm_desired_gap(double v, double delta_v, const BehaviorParams& p);

/// IDM acceleration for speed `v`, approach rate `delta_v` (positive when
/// closing in) and bumper gap `gap`. Pass +infinity for a free road.
/// The result is clipped to [-2 * a_des, a_max].
double idm_acceleration(double v, double delta_v, double gap, const BehaviorParams& p);

/// Same law without the hard-braking clip.
double idm_acceleration_unclipped(double v, double delta_v, double gap, const BehaviorParams& p);

}  // namespace altruist::driver
