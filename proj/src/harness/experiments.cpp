#include "altruist/harness/experiments.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <stdexcept>

#include "altruist/common/csv.hpp"

namespace altruist::harness {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void report(const ProgressFn& progress, const std::string& msg) {
  if (progress) progress(msg);
}

}  // namespace

std::vector<Domain> all_domains() {
  std::vector<Domain> out;
  for (sim::ScenarioKind k : {sim::ScenarioKind::Merge, sim::ScenarioKind::Exit}) {
    for (Population p : {Population::Aggressive, Population::Moderate, Population::Conservative, Population::Mixed}) {
      out.push_back({k, p});
    }
  }
  return out;
}

std::string domain_name(const Domain& d) {
  return std::string(sim::to_string(d.scenario)) + "/" + std::string(to_string(d.population));
}

Domain domain_from_string(std::string_view name) {
  const auto slash = name.find('/');
  if (slash == std::string_view::npos) throw std::invalid_argument("domain must be scenario/population: " + std::string(name));
  Domain d{sim::scenario_kind_from_string(name.substr(0, slash)), population_from_string(name.substr(slash + 1))};
  if (d.scenario == sim::ScenarioKind::Drive) throw std::invalid_argument("drive is not an evaluation domain");
  return d;
}

std::vector<Domain> parse_domains(const std::vector<std::string>& names) {
  if (names.empty()) return all_domains();
  std::vector<Domain> out;
  for (const std::string& n : names) out.push_back(domain_from_string(n));
  return out;
}

// Adaptation matrix ------------------------------------------------------------

double AdaptationMatrix::diagonal_mean() const {
  double sum = 0.0;
  int n = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (rows[r] == cols[c] && !std::isnan(error(r, c))) {
        sum += error(r, c);
        ++n;
      }
    }
  }
  return n ? sum / n : kNaN;
}

double AdaptationMatrix::off_diagonal_mean() const {
  double sum = 0.0;
  int n = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (!(rows[r] == cols[c]) && !std::isnan(error(r, c))) {
        sum += error(r, c);
        ++n;
      }
    }
  }
  return n ? sum / n : kNaN;
}

AdaptationMatrix assemble_matrix(std::vector<Domain> rows, std::vector<Domain> cols, std::vector<CellMetrics> cells,
                                 double w_s, double w_e) {
  if (cells.size() != rows.size() * cols.size()) throw std::invalid_argument("cell count does not match the matrix shape");
  AdaptationMatrix m;
  m.rows = std::move(rows);
  m.cols = std::move(cols);
  m.cells = std::move(cells);
  m.dt_max.assign(m.cols.size(), kNaN);
  for (std::size_t c = 0; c < m.cols.size(); ++c) {
    for (std::size_t r = 0; r < m.rows.size(); ++r) {
      const CellMetrics& cell = m.cell(r, c);
      if (cell.ok && (std::isnan(m.dt_max[c]) || cell.dt > m.dt_max[c])) m.dt_max[c] = cell.dt;
    }
  }
  m.a_error.assign(m.cells.size(), kNaN);
  for (std::size_t r = 0; r < m.rows.size(); ++r) {
    for (std::size_t c = 0; c < m.cols.size(); ++c) {
      const CellMetrics& cell = m.cell(r, c);
      if (!cell.ok || !(m.dt_max[c] > 0.0)) continue;
      m.a_error[r * m.cols.size() + c] = adaptation_error(cell.crash_pct, cell.dt, m.dt_max[c], w_s, w_e);
    }
  }
  return m;
}

AdaptationMatrix adaptation_matrix(const ExperimentConfig& c, const std::vector<Domain>& rows,
                                   const std::vector<Domain>& cols, const ProgressFn& progress) {
  if (rows.empty() || cols.empty()) throw std::invalid_argument("adaptation matrix needs rows and columns");
  std::vector<CellMetrics> cells(rows.size() * cols.size());
  const std::vector<std::uint64_t> seeds = eval_seeds(c.seed, c.harness.eval_episodes);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::optional<Policy> policy;
    try {
      report(progress, "training " + domain_name(rows[r]));
      learn::TrainResult t = learn::train_marl(c.train_setup(rows[r].scenario, rows[r].population, c.reward.phi));
      policy = Policy::network(std::move(t.q.online));
    } catch (const std::exception& e) {
      for (std::size_t col = 0; col < cols.size(); ++col) cells[r * cols.size() + col].error = e.what();
      continue;
    }
    for (std::size_t col = 0; col < cols.size(); ++col) {
      CellMetrics& cell = cells[r * cols.size() + col];
      try {
        report(progress, "evaluating " + domain_name(rows[r]) + " on " + domain_name(cols[col]));
        const Aggregate a = aggregate(run_episodes(*policy, eval_setup(c, cols[col].scenario, cols[col].population),
                                                   seeds, c.harness.workers));
        cell.ok = true;
        cell.crash_pct = a.crash_pct;
        cell.dt = a.dt_mean;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  }
  return assemble_matrix(rows, cols, std::move(cells), c.harness.w_s, c.harness.w_e);
}

std::vector<CellMetrics> read_synthetic_cells(std::istream& in, const std::vector<Domain>& rows,
                                              const std::vector<Domain>& cols) {
  std::vector<CellMetrics> cells(rows.size() * cols.size());
  std::vector<bool> seen(cells.size(), false);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("synthetic metrics: empty file");
  const std::vector<std::string> header = parse_csv_row(line);
  if (header != std::vector<std::string>{"train", "test", "crash_pct", "dt"}) {
    throw std::runtime_error("synthetic metrics: header must be train,test,crash_pct,dt");
  }
  auto index = [](const std::vector<Domain>& ds, const Domain& d) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (ds[i] == d) return i;
    }
    return std::nullopt;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = parse_csv_row(line);
    if (f.size() != 4) throw std::runtime_error("synthetic metrics: expected 4 fields in '" + line + "'");
    const auto r = index(rows, domain_from_string(f[0]));
    const auto col = index(cols, domain_from_string(f[1]));
    if (!r || !col) continue;
    CellMetrics& cell = cells[*r * cols.size() + *col];
    cell.ok = true;
    cell.crash_pct = std::stod(f[2]);
    cell.dt = std::stod(f[3]);
    seen[*r * cols.size() + *col] = true;
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!seen[i]) cells[i].error = "no injected metrics";
  }
  return cells;
}

// Transfer learning --------------------------------------------------------------

std::vector<Regimen> transfer_schedule() {
  using K = sim::ScenarioKind;
  return {{"T1", K::Merge, std::nullopt}, {"T2", K::Merge, "drive"}, {"T3", K::Merge, "T4"},
          {"T4", K::Exit, std::nullopt},  {"T5", K::Exit, "drive"},  {"T6", K::Exit, "T1"}};
}

std::vector<double> smooth(const std::vector<double>& x, int window) {
  if (window < 1) throw std::invalid_argument("smoothing window must be >= 1");
  std::vector<double> out(x.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum += x[i];
    if (i >= static_cast<std::size_t>(window)) sum -= x[i - static_cast<std::size_t>(window)];
    out[i] = sum / static_cast<double>(std::min<std::size_t>(i + 1, static_cast<std::size_t>(window)));
  }
  return out;
}

LearningCurve learning_curve(const std::string& name, const std::vector<learn::EpisodeLog>& log, int window) {
  LearningCurve c;
  c.name = name;
  c.log = log;
  std::vector<double> mission, ret;
  for (const learn::EpisodeLog& l : log) {
    mission.push_back(l.mission);
    ret.push_back(l.ret);
  }
  c.mission = smooth(mission, window);
  c.ret = smooth(ret, window);
  return c;
}

LearningCurve run_regimen(const ExperimentConfig& c, const Regimen& r,
                          std::map<std::string, std::vector<float>>& checkpoints) {
  std::optional<std::vector<float>> initial;
  if (r.source) {
    const auto it = checkpoints.find(*r.source);
    if (it == checkpoints.end()) throw std::runtime_error(r.name + " needs the '" + *r.source + "' checkpoint");
    initial = it->second;
  }
  learn::TrainResult t = learn::train_marl(c.train_setup(r.task, c.behaviors.population, c.reward.phi), initial);
  checkpoints[r.name] = t.q.online.params();
  return learning_curve(r.name, t.log, c.harness.smoothing_window);
}

std::vector<LearningCurve> transfer_experiment(const ExperimentConfig& c,
                                               std::map<std::string, std::vector<float>>& checkpoints,
                                               const ProgressFn& progress) {
  if (!checkpoints.contains("drive")) {
    report(progress, "training drive");
    const learn::TrainResult t =
        learn::train_marl(c.train_setup(sim::ScenarioKind::Drive, c.behaviors.population, c.reward.phi));
    checkpoints["drive"] = t.q.online.params();
  }
  const std::vector<Regimen> schedule = transfer_schedule();
  std::map<std::string, LearningCurve> curves;
  // Scratch runs first: T3 and T6 start from their final weights.
  for (const char* name : {"T1", "T4", "T2", "T3", "T5", "T6"}) {
    for (const Regimen& r : schedule) {
      if (r.name != name) continue;
      report(progress, "training " + r.name);
      curves[r.name] = run_regimen(c, r, checkpoints);
    }
  }
  std::vector<LearningCurve> out;
  for (const Regimen& r : schedule) out.push_back(std::move(curves.at(r.name)));
  return out;
}

// Sensitivity ----------------------------------------------------------------------

driver::BehaviorParams interpolate_axes(const driver::BehaviorParams& conservative,
                                        const driver::BehaviorParams& aggressive, double lateral,
                                        double longitudinal) {
  const driver::BehaviorParams lat = driver::interpolate(conservative, aggressive, lateral);
  driver::BehaviorParams p = driver::interpolate(conservative, aggressive, longitudinal);
  p.politeness = lat.politeness;
  p.delta_a_th = lat.delta_a_th;
  p.b_safe = lat.b_safe;
  p.label = driver::BehaviorLabel::Custom;
  if (lateral == longitudinal) p.label = lat.label;
  return p;
}

std::vector<std::pair<double, double>> axis_points(int n) {
  if (n < 2) throw std::invalid_argument("an axis needs at least two points");
  std::vector<std::pair<double, double>> out;
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    out.emplace_back(t, t);
  }
  return out;
}

std::vector<std::pair<double, double>> grid_points(int n) {
  std::vector<std::pair<double, double>> out;
  for (const auto& [lat, unused] : axis_points(n)) {
    for (const auto& [lon, unused2] : axis_points(n)) out.emplace_back(lat, lon);
  }
  return out;
}

std::vector<SweepPoint> sensitivity_sweep(const ExperimentConfig& c, const Policy& social, const Policy& egoistic,
                                          const std::vector<std::pair<double, double>>& points,
                                          const ProgressFn& progress) {
  const std::vector<std::uint64_t> seeds = eval_seeds(c.seed, c.harness.eval_episodes);
  std::vector<SweepPoint> out;
  for (const auto& [lat, lon] : points) {
    SweepPoint p;
    p.lateral = lat;
    p.longitudinal = lon;
    report(progress, "sweep point lateral=" + format_double(lat) + " longitudinal=" + format_double(lon));
    EvalSetup s = eval_setup(c);
    s.mix = driver::BehaviorMix::point(interpolate_axes(c.behaviors.conservative, c.behaviors.aggressive, lat, lon));
    p.social = aggregate(run_episodes(social, s, seeds, c.harness.workers));
    s.reward.phi = c.harness.phi_egoistic;
    p.egoistic = aggregate(run_episodes(egoistic, s, seeds, c.harness.workers));
    p.crash_difference = p.egoistic.crash_pct - p.social.crash_pct;
    p.pg_safety = pg_safety(p.egoistic.crash_pct, p.social.crash_pct, static_cast<int>(seeds.size()));
    p.pg_efficiency = pg_efficiency(p.social.dt_mean, p.egoistic.dt_mean);
    out.push_back(p);
  }
  return out;
}

std::vector<PhiPoint> phi_sweep(const ExperimentConfig& c, const ProgressFn& progress) {
  if (c.harness.phi_candidates.empty()) throw std::invalid_argument("phi sweep needs candidate angles");
  const std::vector<std::uint64_t> seeds = eval_seeds(c.seed, c.harness.eval_episodes);
  std::vector<PhiPoint> out;
  for (double phi : c.harness.phi_candidates) {
    report(progress, "training phi=" + format_double(phi));
    ExperimentConfig cc = c;
    cc.reward.phi = phi;
    learn::TrainResult t = learn::train_marl(cc.train_setup());
    PhiPoint p;
    p.phi = phi;
    p.aggregate = aggregate(run_episodes(Policy::network(std::move(t.q.online)), eval_setup(cc), seeds, c.harness.workers));
    out.push_back(p);
  }
  double dt_max = 0.0;
  for (const PhiPoint& p : out) dt_max = std::max(dt_max, p.aggregate.dt_mean);
  for (PhiPoint& p : out) {
    p.a_error = dt_max > 0.0 ? adaptation_error(p.aggregate.crash_pct, p.aggregate.dt_mean, dt_max, c.harness.w_s, c.harness.w_e)
                             : kNaN;
  }
  return out;
}

std::size_t best_phi(const std::vector<PhiPoint>& points) {
  if (points.empty()) throw std::invalid_argument("no phi candidates");
  std::size_t best = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].a_error < points[best].a_error) best = i;
  }
  return best;
}

}  // namespace altruist::harness
