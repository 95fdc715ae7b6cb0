#include "altruist/driver/behavior.hpp"

#include <cmath>
#include <stdexcept>

namespace altruist::driver {

std::string_view to_string(BehaviorLabel label) {
  switch (label) {
    case BehaviorLabel::Aggressive: return "aggressive";
    case BehaviorLabel::Moderate: return "moderate";
    case BehaviorLabel::Conservative: return "conservative";
    case BehaviorLabel::Custom: return "custom";
  }
  return "custom";
}

BehaviorLabel behavior_label_from_string(std::string_view name) {
  if (name == "aggressive") return BehaviorLabel::Aggressive;
  if (name == "moderate") return BehaviorLabel::Moderate;
  if (name == "conservative") return BehaviorLabel::Conservative;
  if (name == "custom") return BehaviorLabel::Custom;
  throw std::invalid_argument("unknown behavior label: " + std::string(name));
}

void BehaviorParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid behavior params: ") + what);
  };
  require(std::isfinite(v0) && v0 > 0.0, "v0 must be > 0");
  require(std::isfinite(time_gap) && time_gap >= 0.0, "T0 must be >= 0");
  require(std::isfinite(min_gap) && min_gap > 0.0, "d0 must be > 0");
  require(std::isfinite(a_max) && a_max > 0.0, "a_max must be > 0");
  require(std::isfinite(a_des) && a_des > 0.0, "a_des must be > 0");
  require(std::isfinite(b_safe) && b_safe > 0.0, "b_safe must be > 0");
  require(politeness >= 0.0 && politeness <= 1.0, "politeness must lie in [0, 1]");
  require(std::isfinite(delta) && delta > 0.0, "delta must be > 0");
  require(std::isfinite(delta_a_th), "delta_a_th must be finite");
}

BehaviorParams typical_params() {
  BehaviorParams p;
  p.v0 = 30.0;
  p.time_gap = 1.5;
  p.min_gap = 2.0;
  p.a_max = 1.0;
  p.a_des = 1.5;
  p.delta = 4.0;
  p.politeness = 0.5;
  p.delta_a_th = 0.1;
  p.b_safe = 4.0;
  p.label = BehaviorLabel::Custom;
  return p;
}

BehaviorParams aggressive_params() {
  BehaviorParams p;
  p.politeness = 0.0;
  p.delta_a_th = 0.0;
  p.b_safe = 12.0;
  p.time_gap = 0.5;
  p.min_gap = 1.0;
  p.a_max = 7.0;
  p.a_des = 12.0;
  p.label = BehaviorLabel::Aggressive;
  return p;
}

BehaviorParams moderate_params() {
  BehaviorParams p;
  p.politeness = 0.3;
  p.delta_a_th = 0.1;
  p.b_safe = 6.0;
  p.time_gap = 1.0;
  p.min_gap = 2.0;
  p.a_max = 3.0;
  p.a_des = 7.0;
  p.label = BehaviorLabel::Moderate;
  return p;
}

BehaviorParams conservative_params() {
  BehaviorParams p;
  p.politeness = 1.0;
  p.delta_a_th = 0.4;
  p.b_safe = 2.0;
  p.time_gap = 3.0;
  p.min_gap = 6.0;
  p.a_max = 1.0;
  p.a_des = 2.0;
  p.label = BehaviorLabel::Conservative;
  return p;
}

BehaviorParams preset(BehaviorLabel label) {
  switch (label) {
    case BehaviorLabel::Aggressive: return aggressive_params();
    case BehaviorLabel::Moderate: return moderate_params();
    case BehaviorLabel::Conservative: return conservative_params();
    case BehaviorLabel::Custom: return typical_params();
  }
  return typical_params();
}

BehaviorParams interpolate(const BehaviorParams& from, const BehaviorParams& to, double t) {
  if (t == 0.0) return from;
  if (t == 1.0) return to;
  auto lerp = [t](double a, double b) { return a + t * (b - a); };
  BehaviorParams p;
  p.v0 = lerp(from.v0, to.v0);
  p.time_gap = lerp(from.time_gap, to.time_gap);
  p.min_gap = lerp(from.min_gap, to.min_gap);
  p.a_max = lerp(from.a_max, to.a_max);
  p.a_des = lerp(from.a_des, to.a_des);
  p.delta = lerp(from.delta, to.delta);
  p.politeness = lerp(from.politeness, to.politeness);
  p.delta_a_th = lerp(from.delta_a_th, to.delta_a_th);
  p.b_safe = lerp(from.b_safe, to.b_safe);
  p.label = BehaviorLabel::Custom;
  return p;
}

void to_json(nlohmann::json& j, const BehaviorParams& p) {
  j = nlohmann::json{{"label", std::string(to_string(p.label))},
                     {"sin_phi_e", p.politeness},
                     {"delta_a_th", p.delta_a_th},
                     {"b_safe", p.b_safe},
                     {"T0", p.time_gap},
                     {"d0", p.min_gap},
                     {"acc_max", p.a_max},
                     {"acc_des", p.a_des},
                     {"v0", p.v0},
                     {"delta", p.delta}};
}

void from_json(const nlohmann::json& j, BehaviorParams& p) {
  // Start from the named preset so partial overrides keep the remaining fields.
  BehaviorParams base = typical_params();
  if (j.contains("label")) {
    base = preset(behavior_label_from_string(j.at("label").get<std::string>()));
  }
  base.politeness = j.value("sin_phi_e", base.politeness);
  base.delta_a_th = j.value("delta_a_th", base.delta_a_th);
  base.b_safe = j.value("b_safe", base.b_safe);
  base.time_gap = j.value("T0", base.time_gap);
  base.min_gap = j.value("d0", base.min_gap);
  base.a_max = j.value("acc_max", base.a_max);
  base.a_des = j.value("acc_des", base.a_des);
  base.v0 = j.value("v0", base.v0);
  base.delta = j.value("delta", base.delta);
  base.validate();
  p = base;
}

BehaviorMix::BehaviorMix(std::vector<std::pair<BehaviorParams, double>> entries)
    : entries_(std::move(entries)) {
  double total = 0.0;
  for (const auto& [params, weight] : entries_) {
    if (!(weight >= 0.0) || !std::isfinite(weight)) {
      throw std::invalid_argument("behavior mix weights must be finite and nonnegative");
    }
    params.validate();
    total += weight;
  }
  if (!entries_.empty() && total <= 0.0) {
    throw std::invalid_argument("behavior mix weights must sum to a positive value");
  }
}

BehaviorMix BehaviorMix::point(const BehaviorParams& p) { return BehaviorMix({{p, 1.0}}); }

BehaviorMix BehaviorMix::uniform_presets() {
  return BehaviorMix({{aggressive_params(), 1.0}, {moderate_params(), 1.0}, {conservative_params(), 1.0}});
}

BehaviorParams sample_behavior(const BehaviorMix& mix, std::mt19937_64& rng) {
  if (mix.empty()) throw std::invalid_argument("cannot sample from an empty behavior mix");
  const auto& entries = mix.entries();
  if (entries.size() == 1) return entries.front().first;
  double total = 0.0;
  for (const auto& e : entries) total += e.second;
  std::uniform_real_distribution<double> uniform(0.0, total);
  const double u = uniform(rng);
  double acc = 0.0;
  for (const auto& [params, weight] : entries) {
    acc += weight;
    if (u < acc) return params;
  }
  // u == total can only happen through rounding; fall back to the last weighted entry.
  for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
    if (it->second > 0.0) return it->first;
  }
  return entries.back().first;
}

}  // namespace altruist::driver
