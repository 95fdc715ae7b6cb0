#include <doctest.h>

#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "altruist/driver/behavior.hpp"
#include "altruist/driver/idm.hpp"
#include "altruist/driver/mobil.hpp"

using namespace altruist::driver;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Independent evaluation of the IDM law, straight from its definition.
double idm_oracle(double v, double dv, double d, const BehaviorParams& p) {
  const double dyn = std::max(0.0, v * p.time_gap + v * dv / (2.0 * std::sqrt(p.a_max * p.a_des)));
  const double ds = p.min_gap + dyn;
  return p.a_max * (1.0 - std::pow(v / p.v0, p.delta) - (ds / d) * (ds / d));
}

LaneChangeAccelerations accs(double ego_gain, double new_follower_change, double old_follower_change) {
  LaneChangeAccelerations a;
  a.ego_now = 0.0;
  a.ego_after = ego_gain;
  a.new_follower_now = 0.0;
  a.new_follower_after = new_follower_change;
  a.old_follower_now = 0.0;
  a.old_follower_after = old_follower_change;
  return a;
}

}  // namespace

TEST_CASE("idm acceleration at desired speed on a free road vanishes") {
  CHECK(std::abs(idm_acceleration(30.0, 0.0, 1e9, moderate_params())) < 1e-6);
  CHECK(std::abs(idm_acceleration(30.0, 0.0, kInf, moderate_params())) < 1e-12);
}

TEST_CASE("idm acceleration from standstill on a free road equals a_max") {
  const BehaviorParams p = moderate_params();
  CHECK(p.a_max == 3.0);
  CHECK(idm_acceleration(0.0, 0.0, 1e9, p) == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("idm acceleration at the desired gap with textbook parameters") {
  const BehaviorParams p = typical_params();
  CHECK(idm_desired_gap(30.0, 0.0, p) == doctest::Approx(47.0));
  CHECK(idm_acceleration(30.0, 0.0, 47.0, p) == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("desired gap") {
  const BehaviorParams p = typical_params();
  CHECK(idm_desired_gap(0.0, 0.0, p) == 2.0);
  CHECK(idm_desired_gap(30.0, 0.0, p) == doctest::Approx(47.0));
  CHECK(idm_desired_gap(20.0, 2.0, p) == doctest::Approx(2.0 + 30.0 + 40.0 / (2.0 * std::sqrt(1.5))));
  CHECK(idm_desired_gap(20.0, 2.0, p) == doctest::Approx(48.33).epsilon(1e-3));
  // A fast-opening gap would make the dynamic term negative; d* is floored at d0.
  CHECK(idm_desired_gap(1.0, -50.0, p) == 2.0);
}

TEST_CASE("idm matches the oracle and clips hard braking") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> v(0.0, 35.0), dv(-10.0, 10.0), d(1.0, 200.0);
  for (const BehaviorParams& p : {typical_params(), aggressive_params(), moderate_params(), conservative_params()}) {
    for (int i = 0; i < 500; ++i) {
      const double a = v(rng), b = dv(rng), c = d(rng);
      const double raw = idm_oracle(a, b, c, p);
      CHECK(idm_acceleration_unclipped(a, b, c, p) == doctest::Approx(raw).epsilon(1e-12));
      CHECK(idm_acceleration(a, b, c, p) == doctest::Approx(std::clamp(raw, -2.0 * p.a_des, p.a_max)));
    }
  }
}

TEST_CASE("idm gap clamp keeps overlapping vehicles finite") {
  const double a = idm_acceleration(10.0, 0.0, -3.0, moderate_params());
  CHECK(std::isfinite(a));
  CHECK(a == -2.0 * moderate_params().a_des);
}

TEST_CASE("idm is monotone in approach rate and gap") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> v(0.0, 35.0), dv(-10.0, 10.0), d(0.5, 150.0), step(0.0, 5.0);
  const BehaviorParams p = typical_params();
  for (int i = 0; i < 2000; ++i) {
    const double a = v(rng), b = dv(rng), c = d(rng);
    CHECK(idm_acceleration(a, b + step(rng), c, p) <= idm_acceleration(a, b, c, p));
    CHECK(idm_acceleration(a, b, c + step(rng), p) >= idm_acceleration(a, b, c, p));
  }
}

TEST_CASE("mobil safety criterion vetoes regardless of incentive") {
  BehaviorParams p = typical_params();
  p.b_safe = 4.0;
  LaneChangeAccelerations a = accs(10.0, 0.0, 0.0);
  a.new_follower_after = -5.0;
  CHECK_FALSE(mobil_safe(a, p));
  CHECK(mobil_decide(a, p) == LaneDecision::Stay);
}

TEST_CASE("mobil aggressive driver ignores followers") {
  const BehaviorParams p = aggressive_params();
  CHECK(p.politeness == 0.0);
  CHECK(p.delta_a_th == 0.0);
  const LaneChangeAccelerations a = accs(0.1, -2.0, -2.0);
  CHECK(mobil_incentive(a, p) == doctest::Approx(0.1));
  CHECK(mobil_decide(a, p) == LaneDecision::Change);
}

TEST_CASE("mobil conservative driver stays when followers lose more than it gains") {
  const BehaviorParams p = conservative_params();
  const LaneChangeAccelerations a = accs(0.5, -0.3, -0.3);
  CHECK(mobil_incentive(a, p) == doctest::Approx(-0.1));
  CHECK(mobil_decide(a, p) == LaneDecision::Stay);
}

TEST_CASE("mobil with zero politeness is bitwise independent of follower terms") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  BehaviorParams p = moderate_params();
  p.politeness = 0.0;
  p.b_safe = 1e9;
  for (int i = 0; i < 1000; ++i) {
    LaneChangeAccelerations a = accs(u(rng), u(rng), u(rng));
    a.ego_now = u(rng);
    LaneChangeAccelerations b = a;
    b.new_follower_now = b.new_follower_after = 0.0;
    b.old_follower_now = b.old_follower_after = 0.0;
    CHECK(mobil_decide(a, p) == mobil_decide(b, p));
  }
}

TEST_CASE("mobil with full politeness compares the summed change to the threshold") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  BehaviorParams p = conservative_params();
  p.b_safe = 1e9;
  for (int i = 0; i < 1000; ++i) {
    const LaneChangeAccelerations a = accs(u(rng), u(rng), u(rng));
    const double total = a.ego_after + a.new_follower_after + a.old_follower_after;
    CHECK((mobil_decide(a, p) == LaneDecision::Change) == (total > p.delta_a_th));
  }
}

TEST_CASE("mobil treats missing neighbours as absent") {
  MobilNeighbors n;
  n.ego_speed = 20.0;
  n.old_leader = Neighbor{10.0, 15.0, typical_params()};
  const BehaviorParams p = typical_params();
  const LaneChangeAccelerations a = mobil_accelerations(n, p);
  CHECK(a.ego_after == doctest::Approx(idm_acceleration(20.0, 0.0, kInf, p)));
  CHECK(a.new_follower_now == 0.0);
  CHECK(a.new_follower_after == 0.0);
  CHECK(a.ego_now < a.ego_after);
}

TEST_CASE("preset values") {
  const BehaviorParams a = aggressive_params(), m = moderate_params(), c = conservative_params();
  const std::array<std::array<double, 7>, 3> expected = {{{0.0, 0.0, 12.0, 0.5, 1.0, 7.0, 12.0},
                                                          {0.3, 0.1, 6.0, 1.0, 2.0, 3.0, 7.0},
                                                          {1.0, 0.4, 2.0, 3.0, 6.0, 1.0, 2.0}}};
  int row = 0;
  for (const BehaviorParams& p : {a, m, c}) {
    const auto& e = expected[static_cast<std::size_t>(row++)];
    CHECK(p.politeness == e[0]);
    CHECK(p.delta_a_th == e[1]);
    CHECK(p.b_safe == e[2]);
    CHECK(p.time_gap == e[3]);
    CHECK(p.min_gap == e[4]);
    CHECK(p.a_max == e[5]);
    CHECK(p.a_des == e[6]);
  }
  const BehaviorParams t = typical_params();
  CHECK(t.v0 == 30.0);
  CHECK(t.time_gap == 1.5);
  CHECK(t.a_max == 1.0);
  CHECK(t.a_des == 1.5);
  CHECK(t.delta == 4.0);
  CHECK(t.min_gap == 2.0);
}

TEST_CASE("presets round-trip through json exactly") {
  for (const BehaviorParams& p : {typical_params(), aggressive_params(), moderate_params(), conservative_params()}) {
    const nlohmann::json j = p;
    CHECK(j.get<BehaviorParams>() == p);
    CHECK(nlohmann::json(j.get<BehaviorParams>()).dump() == j.dump());
  }
}

TEST_CASE("invalid parameters are rejected") {
  BehaviorParams p = moderate_params();
  p.politeness = 1.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = moderate_params();
  p.min_gap = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  nlohmann::json j = moderate_params();
  j["v0"] = -1.0;
  CHECK_THROWS(j.get<BehaviorParams>());
}

TEST_CASE("sample_behavior") {
  std::mt19937_64 rng(1);
  const BehaviorMix point = BehaviorMix::point(aggressive_params());
  for (int i = 0; i < 100; ++i) CHECK(sample_behavior(point, rng) == aggressive_params());

  const BehaviorMix uniform = BehaviorMix::uniform_presets();
  std::array<int, 3> counts{};
  const int n = 30000;
  for (int i = 0; i < n; ++i) {
    const BehaviorParams p = sample_behavior(uniform, rng);
    if (p == aggressive_params()) ++counts[0];
    else if (p == moderate_params()) ++counts[1];
    else if (p == conservative_params()) ++counts[2];
  }
  CHECK(counts[0] + counts[1] + counts[2] == n);
  for (int c : counts) CHECK(std::abs(c / static_cast<double>(n) - 1.0 / 3.0) <= 0.01);

  std::mt19937_64 r1(42), r2(42);
  for (int i = 0; i < 200; ++i) CHECK(sample_behavior(uniform, r1) == sample_behavior(uniform, r2));

  CHECK_THROWS_AS(sample_behavior(BehaviorMix{}, rng), std::invalid_argument);
}

TEST_CASE("interpolation endpoints") {
  CHECK(interpolate(conservative_params(), aggressive_params(), 0.0).b_safe == conservative_params().b_safe);
  CHECK(interpolate(conservative_params(), aggressive_params(), 1.0).time_gap == aggressive_params().time_gap);
  CHECK(interpolate(conservative_params(), aggressive_params(), 0.5).a_max == doctest::Approx(4.0));
}
