#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "altruist/harness/config.hpp"
#include "altruist/harness/evaluate.hpp"

namespace altruist::harness {

struct Domain {
  sim::ScenarioKind scenario = sim::ScenarioKind::Merge;
  Population population = Population::Mixed;

  friend bool operator==(const Domain&, const Domain&) = default;
};

/// Merge and exit crossed with the four populations, merge first.
std::vector<Domain> all_domains();
std::string domain_name(const Domain& d);  // e.g. "merge/aggressive"
/// Accepts "merge/aggressive" as well as the short "f_m/b_a" form.
Domain domain_from_string(std::string_view name);
/// Empty `names` selects all eight domains.
std::vector<Domain> parse_domains(const std::vector<std::string>& names);

using ProgressFn = std::function<void(const std::string&)>;

// Adaptation matrix ------------------------------------------------------------

struct CellMetrics {
  bool ok = false;
  double crash_pct = 0.0;
  double dt = 0.0;
  std::string error;
};

struct AdaptationMatrix {
  std::vector<Domain> rows;  // training domains
  std::vector<Domain> cols;  // test domains
  std::vector<CellMetrics> cells;
  std::vector<double> dt_max;   // per column, max DT over the column's rows
  std::vector<double> a_error;  // NaN for failed cells

  const CellMetrics& cell(std::size_t r, std::size_t c) const { return cells[r * cols.size() + c]; }
  double error(std::size_t r, std::size_t c) const { return a_error[r * cols.size() + c]; }
  /// Means over successful cells whose train and test domains coincide / differ.
  double diagonal_mean() const;
  double off_diagonal_mean() const;
};

/// Fills dt_max and a_error from measured or injected cell metrics.
AdaptationMatrix assemble_matrix(std::vector<Domain> rows, std::vector<Domain> cols, std::vector<CellMetrics> cells,
                                 double w_s, double w_e);

/// Trains one policy per row domain and evaluates it on every column domain.
/// Failures are recorded per cell and the matrix still completes.
AdaptationMatrix adaptation_matrix(const ExperimentConfig& c, const std::vector<Domain>& rows,
                                   const std::vector<Domain>& cols, const ProgressFn& progress = {});

/// Injected metrics: CSV with columns train,test,crash_pct,dt.
std::vector<CellMetrics> read_synthetic_cells(std::istream& in, const std::vector<Domain>& rows,
                                              const std::vector<Domain>& cols);

// Transfer learning --------------------------------------------------------------

struct Regimen {
  std::string name;              // T1 .. T6
  sim::ScenarioKind task;
  std::optional<std::string> source;  // checkpoint key the run starts from
};

/// T1 merge from scratch, T2 drive->merge, T3 exit->merge, T4 exit from
/// scratch, T5 drive->exit, T6 merge->exit.
std::vector<Regimen> transfer_schedule();

struct LearningCurve {
  std::string name;
  std::vector<learn::EpisodeLog> log;
  std::vector<double> mission;  // smoothed success
  std::vector<double> ret;      // smoothed return
};

/// Trailing moving average over up to `window` entries.
std::vector<double> smooth(const std::vector<double>& x, int window);

LearningCurve learning_curve(const std::string& name, const std::vector<learn::EpisodeLog>& log, int window);

/// Trains one regimen. Throws std::runtime_error when its source checkpoint is
/// missing. Stores the final weights under the regimen name.
LearningCurve run_regimen(const ExperimentConfig& c, const Regimen& r,
                          std::map<std::string, std::vector<float>>& checkpoints);

/// Trains "drive" if absent, then T1 and T4, then the warm-started regimens.
std::vector<LearningCurve> transfer_experiment(const ExperimentConfig& c,
                                               std::map<std::string, std::vector<float>>& checkpoints,
                                               const ProgressFn& progress = {});

// Sensitivity ----------------------------------------------------------------------

/// MOBIL fields follow `lateral`, IDM fields follow `longitudinal`; 0 is the
/// conservative preset and 1 the aggressive one.
driver::BehaviorParams interpolate_axes(const driver::BehaviorParams& conservative,
                                        const driver::BehaviorParams& aggressive, double lateral,
                                        double longitudinal);

/// (t, t) for n evenly spaced t in [0, 1].
std::vector<std::pair<double, double>> axis_points(int n);
/// Full n x n lateral x longitudinal grid, lateral major.
std::vector<std::pair<double, double>> grid_points(int n);

struct SweepPoint {
  double lateral = 0.0;
  double longitudinal = 0.0;
  Aggregate social;
  Aggregate egoistic;
  double pg_safety = 0.0;
  double crash_difference = 0.0;  // C_E - C_S before the per-episode normalisation
  std::optional<double> pg_efficiency;
};

std::vector<SweepPoint> sensitivity_sweep(const ExperimentConfig& c, const Policy& social, const Policy& egoistic,
                                          const std::vector<std::pair<double, double>>& points,
                                          const ProgressFn& progress = {});

struct PhiPoint {
  double phi = 0.0;
  Aggregate aggregate;
  double a_error = 0.0;
};

/// Trains one policy per candidate angle on the configured domain and scores
/// it by A_error with dt_max taken over the candidates.
std::vector<PhiPoint> phi_sweep(const ExperimentConfig& c, const ProgressFn& progress = {});
std::size_t best_phi(const std::vector<PhiPoint>& points);

}  // namespace altruist::harness
