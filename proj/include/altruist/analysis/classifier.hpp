#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "altruist/analysis/centrality.hpp"
#include "altruist/driver/behavior.hpp"

namespace altruist::analysis {

struct SleFeatures {
  double lateral = 0.0;       // SLE_max of closeness
  double longitudinal = 0.0;  // SLE_max of degree
};

/// Boundaries on one feature: above `high` is aggressive, above `low`
/// moderate, anything else conservative. Values on a boundary fall to the
/// calmer class.
struct FeatureThresholds {
  bool enabled = false;
  double low = 0.0;
  double high = 0.0;
};

struct ClassifierConfig {
  FeatureThresholds lateral;
  FeatureThresholds longitudinal;
};

void to_json(nlohmann::json& j, const ClassifierConfig& c);
void from_json(const nlohmann::json& j, ClassifierConfig& c);

/// Each enabled feature votes a level (0 conservative .. 2 aggressive); the
/// label is the floor of the mean vote. Throws std::invalid_argument for
/// non-finite features or when no feature is enabled.
driver::BehaviorLabel classify_behavior(const SleFeatures& f, const ClassifierConfig& c);

/// Scripted rollout: one HV ego with the behaviour under test drives through
/// constant-speed background traffic.
struct CalibrationConfig {
  int through_lanes = 3;
  double road_length = 4000.0;
  int background_per_lane = 5;
  double background_speed_min = 16.0;  // each lane gets one speed from this range
  double background_speed_max = 24.0;
  double spacing_min = 40.0;
  double spacing_max = 90.0;
  double ego_x = 100.0;
  double ego_speed = 20.0;
  double lead_gap = 60.0;    // first background vehicle ahead of the ego
  double duration = 40.0;    // s
  double sample_period = 1.0;
  double radius = kProximityRadius;
  double lane_penalty = kLanePenalty;
  sim::SimConfig sim{};
};

void to_json(nlohmann::json& j, const CalibrationConfig& c);
void from_json(const nlohmann::json& j, CalibrationConfig& c);

/// Ego is vehicle 0 in the middle lane; the rest are scripted.
sim::World build_calibration_world(const CalibrationConfig& c, const driver::BehaviorParams& ego, std::uint64_t seed);

/// Centrality series of vehicle 0 sampled every `sample_period` until `duration`.
CentralitySeries rollout_series(sim::World w, const CalibrationConfig& c);

SleFeatures rollout_features(const CalibrationConfig& c, const driver::BehaviorParams& ego, std::uint64_t seed);

/// Mean features over `n_seeds` rollouts seeded base_seed, base_seed+1, ...
SleFeatures mean_features(const CalibrationConfig& c, const driver::BehaviorParams& ego, std::uint64_t base_seed,
                          int n_seeds);

struct Calibration {
  SleFeatures aggressive;
  SleFeatures moderate;
  SleFeatures conservative;
  ClassifierConfig thresholds;
};

/// Runs the three presets and places each feature's boundaries at the
/// midpoints between class means. A feature whose class means are not
/// strictly ordered stays disabled. Throws std::runtime_error when neither is.
Calibration calibrate(const CalibrationConfig& c, std::uint64_t base_seed, int n_seeds);

struct SweepRow {
  std::size_t index = 0;
  driver::BehaviorParams params;
  SleFeatures mean;
  driver::BehaviorLabel label = driver::BehaviorLabel::Custom;
  std::string error;  // non-empty when the cell failed
};

/// Simulates every grid point over the same seeds and classifies it. Cells run
/// on up to `workers` threads; a failing cell is recorded and skipped.
std::vector<SweepRow> parameter_sweep(const std::vector<driver::BehaviorParams>& grid, const CalibrationConfig& c,
                                      const ClassifierConfig& classifier, std::uint64_t base_seed, int n_seeds,
                                      int workers = 1);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace altruist::analysis
