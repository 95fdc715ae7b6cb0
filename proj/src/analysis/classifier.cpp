#include "altruist/analysis/classifier.hpp"

#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

#include "altruist/common/csv.hpp"
#include "altruist/common/seeding.hpp"

namespace altruist::analysis {

void to_json(nlohmann::json& j, const ClassifierConfig& c) {
  auto one = [](const FeatureThresholds& f) {
    return nlohmann::json{{"enabled", f.enabled}, {"low", f.low}, {"high", f.high}};
  };
  j = nlohmann::json{{"lateral", one(c.lateral)}, {"longitudinal", one(c.longitudinal)}};
}

void from_json(const nlohmann::json& j, ClassifierConfig& c) {
  auto one = [](const nlohmann::json& f) {
    FeatureThresholds t;
    t.enabled = f.value("enabled", true);
    t.low = f.at("low").get<double>();
    t.high = f.at("high").get<double>();
    if (t.enabled && !(t.low <= t.high)) throw std::invalid_argument("classifier thresholds need low <= high");
    return t;
  };
  c = ClassifierConfig{};
  if (j.contains("lateral")) c.lateral = one(j.at("lateral"));
  if (j.contains("longitudinal")) c.longitudinal = one(j.at("longitudinal"));
}

driver::BehaviorLabel classify_behavior(const SleFeatures& f, const ClassifierConfig& c) {
  if (!std::isfinite(f.lateral) || !std::isfinite(f.longitudinal)) {
    throw std::invalid_argument("SLE features must be finite");
  }
  int votes = 0;
  int sum = 0;
  auto vote = [&](const FeatureThresholds& t, double v) {
    if (!t.enabled) return;
    ++votes;
    sum += v > t.high ? 2 : v > t.low ? 1 : 0;
  };
  vote(c.lateral, f.lateral);
  vote(c.longitudinal, f.longitudinal);
  if (votes == 0) throw std::invalid_argument("classifier has no enabled feature");
  switch (sum / votes) {
    case 2: return driver::BehaviorLabel::Aggressive;
    case 1: return driver::BehaviorLabel::Moderate;
    default: return driver::BehaviorLabel::Conservative;
  }
}

void to_json(nlohmann::json& j, const CalibrationConfig& c) {
  j = nlohmann::json{{"through_lanes", c.through_lanes},
                     {"road_length", c.road_length},
                     {"background_per_lane", c.background_per_lane},
                     {"background_speed_min", c.background_speed_min},
                     {"background_speed_max", c.background_speed_max},
                     {"spacing_min", c.spacing_min},
                     {"spacing_max", c.spacing_max},
                     {"ego_x", c.ego_x},
                     {"ego_speed", c.ego_speed},
                     {"lead_gap", c.lead_gap},
                     {"duration", c.duration},
                     {"sample_period", c.sample_period},
                     {"radius", c.radius},
                     {"lane_penalty", c.lane_penalty},
                     {"sim", c.sim}};
}

void from_json(const nlohmann::json& j, CalibrationConfig& c) {
  const CalibrationConfig d;
  c.through_lanes = j.value("through_lanes", d.through_lanes);
  c.road_length = j.value("road_length", d.road_length);
  c.background_per_lane = j.value("background_per_lane", d.background_per_lane);
  c.background_speed_min = j.value("background_speed_min", d.background_speed_min);
  c.background_speed_max = j.value("background_speed_max", d.background_speed_max);
  c.spacing_min = j.value("spacing_min", d.spacing_min);
  c.spacing_max = j.value("spacing_max", d.spacing_max);
  c.ego_x = j.value("ego_x", d.ego_x);
  c.ego_speed = j.value("ego_speed", d.ego_speed);
  c.lead_gap = j.value("lead_gap", d.lead_gap);
  c.duration = j.value("duration", d.duration);
  c.sample_period = j.value("sample_period", d.sample_period);
  c.radius = j.value("radius", d.radius);
  c.lane_penalty = j.value("lane_penalty", d.lane_penalty);
  c.sim = j.contains("sim") ? j.at("sim").get<sim::SimConfig>() : d.sim;
  if (c.through_lanes < 1 || c.background_per_lane < 0 || c.duration <= 0.0 || c.sample_period <= 0.0 ||
      c.spacing_min <= 0.0 || c.spacing_max < c.spacing_min || c.background_speed_max < c.background_speed_min) {
    throw std::invalid_argument("invalid calibration config");
  }
}

sim::World build_calibration_world(const CalibrationConfig& c, const driver::BehaviorParams& ego,
                                   std::uint64_t seed) {
  ego.validate();
  sim::World w;
  w.layout = sim::RoadLayout::straight(c.through_lanes, c.road_length);
  w.cfg = c.sim;
  w.scenario = sim::ScenarioKind::Drive;
  w.rng_seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> speed(c.background_speed_min, c.background_speed_max);
  std::uniform_real_distribution<double> spacing(c.spacing_min, c.spacing_max);

  sim::Vehicle e;
  e.id = 0;
  e.lane = c.through_lanes / 2;
  e.x = c.ego_x;
  e.v = c.ego_speed;
  e.behavior = ego;
  w.vehicles.push_back(e);

  int id = 1;
  for (int lane = 0; lane < c.through_lanes; ++lane) {
    const double v = speed(rng);
    double x = c.ego_x + c.lead_gap + std::uniform_real_distribution<double>(0.0, c.spacing_max)(rng);
    for (int k = 0; k < c.background_per_lane; ++k) {
      sim::Vehicle b;
      b.id = id++;
      b.lane = lane;
      b.x = x;
      b.v = v;
      b.scripted = true;
      b.behavior = driver::typical_params();
      b.behavior.v0 = std::max(v, 1.0);
      w.vehicles.push_back(b);
      x += spacing(rng);
    }
  }
  return w;
}

CentralitySeries rollout_series(sim::World w, const CalibrationConfig& c) {
  const long per_sample = std::max(1L, std::lround(c.sample_period / w.cfg.dt));
  const long total = std::lround(c.duration / w.cfg.dt);
  std::vector<TrafficFrame> frames;
  frames.push_back(frame_from_world(w));
  for (long k = 1; k <= total; ++k) {
    sim::step_unchecked(w, {});
    if (k % per_sample == 0) frames.push_back(frame_from_world(w));
  }
  return centrality_series(frames, 0, c.radius, c.lane_penalty);
}

SleFeatures rollout_features(const CalibrationConfig& c, const driver::BehaviorParams& ego, std::uint64_t seed) {
  const Sle s = sle(rollout_series(build_calibration_world(c, ego, seed), c));
  return {s.max_lateral, s.max_longitudinal};
}

SleFeatures mean_features(const CalibrationConfig& c, const driver::BehaviorParams& ego, std::uint64_t base_seed,
                          int n_seeds) {
  if (n_seeds < 1) throw std::invalid_argument("need at least one seed");
  SleFeatures sum;
  for (int i = 0; i < n_seeds; ++i) {
    const SleFeatures f = rollout_features(c, ego, base_seed + static_cast<std::uint64_t>(i));
    sum.lateral += f.lateral;
    sum.longitudinal += f.longitudinal;
  }
  return {sum.lateral / n_seeds, sum.longitudinal / n_seeds};
}

namespace {

FeatureThresholds midpoints(double agg, double mod, double con) {
  FeatureThresholds t;
  t.enabled = agg > mod && mod > con;
  if (t.enabled) {
    t.low = 0.5 * (con + mod);
    t.high = 0.5 * (mod + agg);
  }
  return t;
}

}  // namespace

Calibration calibrate(const CalibrationConfig& c, std::uint64_t base_seed, int n_seeds) {
  Calibration cal;
  cal.aggressive = mean_features(c, driver::aggressive_params(), base_seed, n_seeds);
  cal.moderate = mean_features(c, driver::moderate_params(), base_seed, n_seeds);
  cal.conservative = mean_features(c, driver::conservative_params(), base_seed, n_seeds);
  cal.thresholds.lateral = midpoints(cal.aggressive.lateral, cal.moderate.lateral, cal.conservative.lateral);
  cal.thresholds.longitudinal =
      midpoints(cal.aggressive.longitudinal, cal.moderate.longitudinal, cal.conservative.longitudinal);
  if (!cal.thresholds.lateral.enabled && !cal.thresholds.longitudinal.enabled) {
    throw std::runtime_error("calibration could not separate the presets on either feature");
  }
  return cal;
}

std::vector<SweepRow> parameter_sweep(const std::vector<driver::BehaviorParams>& grid, const CalibrationConfig& c,
                                      const ClassifierConfig& classifier, std::uint64_t base_seed, int n_seeds,
                                      int workers) {
  if (grid.empty()) throw std::invalid_argument("parameter sweep needs a nonempty grid");
  std::vector<SweepRow> rows(grid.size());
  const long n = static_cast<long>(grid.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, workers))
  for (long i = 0; i < n; ++i) {
    SweepRow& r = rows[static_cast<std::size_t>(i)];
    r.index = static_cast<std::size_t>(i);
    r.params = grid[static_cast<std::size_t>(i)];
    try {
      r.mean = mean_features(c, r.params, base_seed, n_seeds);
      r.label = classify_behavior(r.mean, classifier);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  write_csv_row(out, {"index", "sin_phi_e", "delta_a_th", "b_safe", "T0", "d0", "acc_max", "acc_des", "v0",
                      "sle_lateral_max", "sle_longitudinal_max", "label", "error"});
  for (const SweepRow& r : rows) {
    const bool ok = r.error.empty();
    const double nan = std::nan("");
    write_csv_row(out, {std::to_string(r.index), format_double(r.params.politeness),
                        format_double(r.params.delta_a_th), format_double(r.params.b_safe),
                        format_double(r.params.time_gap), format_double(r.params.min_gap),
                        format_double(r.params.a_max), format_double(r.params.a_des), format_double(r.params.v0),
                        format_double(ok ? r.mean.lateral : nan), format_double(ok ? r.mean.longitudinal : nan),
                        ok ? std::string(driver::to_string(r.label)) : std::string(), r.error});
  }
}

}  // namespace altruist::analysis
