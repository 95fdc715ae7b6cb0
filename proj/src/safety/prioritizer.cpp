#include "altruist/safety/prioritizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace altruist::safety {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Time to collision with the nearest same-lane neighbours, assuming constant speeds.
double instant_ttc(const sim::World& w, const sim::Vehicle& ego) {
  double best = kInf;
  auto check = [&](int lane) {
    if (const auto leader = sim::leader_in_lane(w, lane, ego.x, ego.length, ego.id)) {
      const double closing = ego.v - leader->vehicle->v;
      if (leader->gap <= 0.0) best = 0.0;
      else if (closing > 0.0) best = std::min(best, leader->gap / closing);
    }
    if (const auto follower = sim::follower_in_lane(w, lane, ego.x, ego.length, ego.id)) {
      const double closing = follower->vehicle->v - ego.v;
      if (follower->gap <= 0.0) best = 0.0;
      else if (closing > 0.0) best = std::min(best, follower->gap / closing);
    }
  };
  check(ego.lane);
  if (ego.vacated_lane != sim::kNoLane) check(ego.vacated_lane);
  return best;
}

}  // namespace

void SafetyConfig::validate() const {
  if (!(safe_th >= 0.0)) throw std::invalid_argument("safety: safe_th must be >= 0");
  if (n_steps < 1) throw std::invalid_argument("safety: n_steps must be >= 1");
  if (!(ttc_cap > safe_th)) throw std::invalid_argument("safety: ttc_cap must exceed safe_th");
}

void to_json(nlohmann::json& j, const SafetyConfig& c) {
  j = nlohmann::json{{"safe_th", c.safe_th}, {"n_steps", c.n_steps}, {"ttc_cap", c.ttc_cap}};
}

void from_json(const nlohmann::json& j, SafetyConfig& c) {
  SafetyConfig d;
  c.safe_th = j.value("safe_th", d.safe_th);
  c.n_steps = j.value("n_steps", d.n_steps);
  c.ttc_cap = j.value("ttc_cap", d.ttc_cap);
  c.validate();
}

double safety_score(const sim::World& w, int ego_id, sim::MetaAction action, const SafetyConfig& cfg) {
  const sim::Vehicle& ego0 = w.vehicle(ego_id);
  if (!ego0.alive()) throw std::invalid_argument("safety_score: ego is not alive");

  sim::World p = w.projection_copy();
  sim::ActionMap first = sim::idle_actions(p);
  first[ego_id] = action;

  const int substeps = p.cfg.substeps_per_decision();
  const int total = cfg.n_steps * substeps;
  double best = cfg.ttc_cap;
  for (int k = 0; k < total; ++k) {
    const sim::Vehicle& ego = p.vehicle(ego_id);
    const double elapsed = k * p.cfg.dt;
    // The pre-step state still carries the lane the ego left in the previous step.
    best = std::min(best, elapsed + instant_ttc(p, ego));
    sim::step_unchecked(p, k == 0 ? first : sim::idle_actions(p));
    const sim::Vehicle& after = p.vehicle(ego_id);
    if (after.crashed) return std::min(best, (k + 1) * p.cfg.dt);
    if (after.departed) return best;
  }
  return std::min(best, total * p.cfg.dt + instant_ttc(p, p.vehicle(ego_id)));
}

int argmax(const ActionValues& q) {
  int best = 0;
  for (int i = 1; i < sim::kActionCount; ++i) {
    if (q[static_cast<std::size_t>(i)] > q[static_cast<std::size_t>(best)]) best = i;
  }
  return best;
}

FilterResult select_action(const ActionValues& q, const std::function<double(sim::MetaAction)>& score_fn,
                           double safe_th, Mode mode, double epsilon, std::mt19937_64& rng) {
  FilterResult r;
  r.scores.fill(std::nan(""));
  bool explore = false;
  if (mode == Mode::Train) {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    explore = u < epsilon;
  }
  r.explored = explore;
  const bool masking = safe_th > 0.0;

  auto score = [&](int a) {
    double& s = r.scores[static_cast<std::size_t>(a)];
    if (std::isnan(s)) s = score_fn(sim::action_from_index(a));
    return s;
  };

  if (explore) {
    std::vector<int> safe;
    for (int a = 0; a < sim::kActionCount; ++a) {
      if (!masking || score(a) >= safe_th) safe.push_back(a);
      else r.rejected.emplace_back(sim::action_from_index(a), score(a));
    }
    if (!safe.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, safe.size() - 1);
      r.chosen = sim::action_from_index(safe[pick(rng)]);
      return r;
    }
  } else {
    // Greedy over the safe subset, evaluating scores lazily in Q order.
    std::array<int, sim::kActionCount> order;
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return q[static_cast<std::size_t>(a)] > q[static_cast<std::size_t>(b)];
    });
    for (int a : order) {
      if (!masking || score(a) >= safe_th) {
        r.chosen = sim::action_from_index(a);
        return r;
      }
      r.rejected.emplace_back(sim::action_from_index(a), score(a));
    }
  }

  r.fallback = true;
  int best = 0;
  for (int a = 1; a < sim::kActionCount; ++a) {
    if (score(a) > score(best)) best = a;
  }
  r.chosen = sim::action_from_index(best);
  std::erase_if(r.rejected, [&](const auto& p) { return p.first == r.chosen; });
  return r;
}

FilterResult filter_actions(const sim::World& w, int ego, const ActionValues& q, const SafetyConfig& cfg, Mode mode,
                            double epsilon, std::mt19937_64& rng) {
  return select_action(
      q, [&](sim::MetaAction a) { return safety_score(w, ego, a, cfg); }, cfg.safe_th, mode, epsilon, rng);
}

void log_mask(sim::World& w, int ego, const FilterResult& r) {
  if (!w.log.record_masks) return;
  const sim::Vehicle& v = w.vehicle(ego);
  for (int a = 0; a < sim::kActionCount; ++a) {
    const double s = r.scores[static_cast<std::size_t>(a)];
    if (std::isnan(s)) continue;
    sim::Event e;
    e.step = w.step_index;
    e.t = w.t;
    e.type = sim::EventType::SafetyMask;
    e.vehicles = {ego};
    e.x = v.x;
    e.lane = v.lane;
    e.action = a;
    e.score = s;
    e.masked = std::any_of(r.rejected.begin(), r.rejected.end(),
                           [&](const auto& p) { return sim::action_index(p.first) == a; });
    w.log.append(e);
  }
}

}  // namespace altruist::safety
