#include "altruist/harness/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "altruist/analysis/classifier.hpp"
#include "altruist/common/csv.hpp"
#include "altruist/harness/output.hpp"

namespace altruist::harness {
namespace fs = std::filesystem;
namespace {

void report(const ProgressFn& progress, const std::string& msg) {
  if (progress) progress(msg);
}

void save_checkpoint_to(const fs::path& path, const learn::Mlp<float>& net, std::int64_t steps,
                        const ExperimentConfig& cfg) {
  std::ostringstream out(std::ios::binary);
  learn::Checkpoint c;
  c.sizes = net.sizes();
  c.steps = steps;
  c.config_hash = learn::config_hash(nlohmann::json(cfg));
  c.params = net.params();
  learn::write_checkpoint(out, c);
  write_file(path, out.str());
}

std::vector<Series> curve_series(const std::vector<LearningCurve>& curves, bool mission) {
  std::vector<Series> out;
  for (const LearningCurve& c : curves) {
    Series s;
    s.name = c.name;
    for (std::size_t i = 0; i < c.log.size(); ++i) {
      s.x.push_back(c.log[i].episode);
      s.y.push_back(mission ? c.mission[i] : c.ret[i]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

void emit_curves(const fs::path& dir, const std::string& stem, const std::vector<LearningCurve>& curves,
                 const ExperimentConfig& cfg) {
  if (curves.empty() || curves.front().log.empty()) throw std::runtime_error("no training episodes to emit");
  write_file(dir / (stem + ".csv"), training_log_csv(curves));
  if (!cfg.harness.svg) return;
  write_file(dir / (stem + "_mission.svg"),
             curves_svg(curve_series(curves, true), "smoothed mission success", "episode", "success rate"));
  write_file(dir / (stem + "_return.svg"), curves_svg(curve_series(curves, false), "smoothed return", "episode", "return"));
}

Policy policy_from(const ExperimentConfig& cfg) {
  if (cfg.harness.policy == "random") return Policy::random();
  if (cfg.harness.policy == "idle") return Policy::constant(sim::MetaAction::Idle);
  if (cfg.harness.checkpoint.empty()) throw std::invalid_argument("eval with a network policy needs a checkpoint");
  return Policy::network(load_network(cfg.harness.checkpoint));
}

void cmd_train(const ExperimentConfig& cfg, const fs::path& dir, const ProgressFn& progress) {
  learn::TrainResult t = learn::train_marl(cfg.train_setup(), std::nullopt, [&](const learn::EpisodeLog& l) {
    if ((l.episode + 1) % 25 == 0) {
      report(progress, "episode " + std::to_string(l.episode + 1) + " mission " + std::to_string(l.mission) +
                           " eps " + format_double(l.epsilon));
    }
  });
  save_checkpoint_to(dir / "checkpoint.bin", t.q.online, t.q.steps(), cfg);
  emit_curves(dir, "training", {learning_curve("train", t.log, cfg.harness.smoothing_window)}, cfg);
}

void cmd_eval(const ExperimentConfig& cfg, const fs::path& dir, const ProgressFn& progress) {
  const Policy p = policy_from(cfg);
  report(progress, "evaluating " + p.name());
  const std::vector<EpisodeMetrics> eps =
      run_episodes(p, eval_setup(cfg), eval_seeds(cfg.seed, cfg.harness.eval_episodes), cfg.harness.workers);
  write_file(dir / "episodes.csv", episodes_csv(eps));
  write_file(dir / "summary.csv", aggregate_csv({{p.name(), aggregate(eps)}}));
}

void cmd_sweep(const ExperimentConfig& cfg, const fs::path& dir, const ProgressFn& progress) {
  if (cfg.harness.sweep == "phi") {
    const std::vector<PhiPoint> pts = phi_sweep(cfg, progress);
    write_file(dir / "phi.csv", phi_csv(pts));
    if (cfg.harness.svg) {
      Series s{"A_error", {}, {}};
      for (const PhiPoint& p : pts) {
        s.x.push_back(p.phi);
        s.y.push_back(p.a_error);
      }
      write_file(dir / "phi.svg", curves_svg({s}, "adaptation error by SVO angle", "phi (rad)", "A_error (%)"));
    }
    return;
  }
  auto obtain = [&](const std::string& path, double phi, const std::string& name) {
    if (!path.empty()) return Policy::network(load_network(path));
    report(progress, "training " + name + " policy");
    ExperimentConfig c = cfg;
    c.reward.phi = phi;
    learn::TrainResult t = learn::train_marl(c.train_setup());
    save_checkpoint_to(dir / (name + ".bin"), t.q.online, t.q.steps(), c);
    return Policy::network(std::move(t.q.online));
  };
  const Policy social = obtain(cfg.harness.checkpoint, cfg.reward.phi, "social");
  const Policy egoistic = obtain(cfg.harness.egoistic_checkpoint, cfg.harness.phi_egoistic, "egoistic");
  const bool grid = cfg.harness.sweep == "grid";
  const auto points = grid ? grid_points(cfg.harness.sweep_points) : axis_points(cfg.harness.sweep_points);
  const std::vector<SweepPoint> res = sensitivity_sweep(cfg, social, egoistic, points, progress);
  write_file(dir / "sweep.csv", sweep_csv(res));
  if (!cfg.harness.svg) return;
  if (grid) {
    const int n = cfg.harness.sweep_points;
    LabeledMatrix m;
    m.corner = "lateral\\longitudinal";
    for (int i = 0; i < n; ++i) {
      m.row_labels.push_back(format_double(res[static_cast<std::size_t>(i * n)].lateral));
      m.col_labels.push_back(format_double(res[static_cast<std::size_t>(i)].longitudinal));
    }
    for (const SweepPoint& p : res) m.values.push_back(p.pg_safety);
    write_file(dir / "pg_safety.svg", heatmap_svg(m, "PG_safety over lateral x longitudinal aggressiveness"));
  } else {
    Series safety{"PG_safety", {}, {}}, efficiency{"PG_efficiency (%)", {}, {}};
    for (const SweepPoint& p : res) {
      safety.x.push_back(p.lateral);
      safety.y.push_back(p.pg_safety);
      efficiency.x.push_back(p.lateral);
      efficiency.y.push_back(p.pg_efficiency.value_or(std::nan("")));
    }
    write_file(dir / "pg_safety.svg", curves_svg({safety}, "safety gain by HV aggressiveness", "aggressiveness", "PG_safety"));
    write_file(dir / "pg_efficiency.svg",
               curves_svg({efficiency}, "efficiency gain by HV aggressiveness", "aggressiveness", "PG_efficiency (%)"));
  }
}

void cmd_adapt_matrix(const ExperimentConfig& cfg, const fs::path& dir, const ProgressFn& progress) {
  const std::vector<Domain> rows = parse_domains(cfg.harness.matrix_rows);
  const std::vector<Domain> cols = parse_domains(cfg.harness.matrix_cols);
  AdaptationMatrix m;
  if (!cfg.harness.synthetic.empty()) {
    std::ifstream in(cfg.harness.synthetic);
    if (!in) throw std::runtime_error("cannot open synthetic metrics " + cfg.harness.synthetic);
    m = assemble_matrix(rows, cols, read_synthetic_cells(in, rows, cols), cfg.harness.w_s, cfg.harness.w_e);
  } else {
    m = adaptation_matrix(cfg, rows, cols, progress);
  }
  const LabeledMatrix err = matrix_table(m, MatrixField::AError);
  write_file(dir / "a_error.csv", matrix_csv(err));
  write_file(dir / "crash.csv", matrix_csv(matrix_table(m, MatrixField::Crash)));
  write_file(dir / "distance.csv", matrix_csv(matrix_table(m, MatrixField::Distance)));
  std::ostringstream failures;
  write_csv_row(failures, {"train", "test", "error"});
  for (std::size_t r = 0; r < m.rows.size(); ++r) {
    for (std::size_t c = 0; c < m.cols.size(); ++c) {
      if (!m.cell(r, c).ok) write_csv_row(failures, {domain_name(m.rows[r]), domain_name(m.cols[c]), m.cell(r, c).error});
    }
  }
  write_file(dir / "failures.csv", failures.str());
  if (cfg.harness.svg) {
    write_file(dir / "a_error.svg", heatmap_svg(err, "adaptation error A_error (%)"));
    write_file(dir / "crash.svg", heatmap_svg(matrix_table(m, MatrixField::Crash), "crash rate (%)"));
    write_file(dir / "distance.svg", heatmap_svg(matrix_table(m, MatrixField::Distance), "distance travelled (m)"));
  }
}

void cmd_transfer(const ExperimentConfig& cfg, const fs::path& dir, const ProgressFn& progress) {
  std::map<std::string, std::vector<float>> ckpts;
  if (!cfg.harness.checkpoint_dir.empty()) {
    for (const char* key : {"drive", "T1", "T4"}) {
      const fs::path p = fs::path(cfg.harness.checkpoint_dir) / (std::string(key) + ".bin");
      if (fs::exists(p)) ckpts[key] = load_network(p).params();
    }
  }
  const std::vector<LearningCurve> curves = transfer_experiment(cfg, ckpts, progress);
  const std::vector<int> sizes = learn::topology(cfg.observation, cfg.learner);
  for (const auto& [key, params] : ckpts) {
    learn::Mlp<float> net(sizes);
    net.params() = params;
    save_checkpoint_to(dir / (key + ".bin"), net, 0, cfg);
  }
  emit_curves(dir, "transfer", curves, cfg);
}

void cmd_classify(const ExperimentConfig& cfg, const fs::path& dir, const ProgressFn& progress) {
  const HarnessConfig& h = cfg.harness;
  analysis::ClassifierConfig classifier;
  if (h.classifier) {
    classifier = *h.classifier;
  } else {
    report(progress, "calibrating classifier");
    const analysis::Calibration cal = analysis::calibrate(h.calibration, cfg.seed, h.calibration_seeds);
    classifier = cal.thresholds;
    std::ostringstream out;
    write_csv_row(out, {"preset", "sle_lateral_max", "sle_longitudinal_max"});
    write_csv_row(out, {"aggressive", format_double(cal.aggressive.lateral), format_double(cal.aggressive.longitudinal)});
    write_csv_row(out, {"moderate", format_double(cal.moderate.lateral), format_double(cal.moderate.longitudinal)});
    write_csv_row(out, {"conservative", format_double(cal.conservative.lateral),
                        format_double(cal.conservative.longitudinal)});
    write_file(dir / "calibration.csv", out.str());
  }
  write_file(dir / "classifier.json", nlohmann::json(classifier).dump(2) + "\n");

  if (!h.log.empty()) {
    std::ifstream in(h.log);
    if (!in) throw std::runtime_error("cannot open log " + h.log);
    const std::vector<analysis::TrafficFrame> frames =
        analysis::frames_from_events(sim::EventLog::read_jsonl(in), sim::build_layout(cfg.scenario));
    if (frames.empty()) throw std::runtime_error("log holds no state events");
    std::set<int> ids;
    for (const auto& f : frames) {
      for (const auto& v : f.vehicles) ids.insert(v.id);
    }
    if (h.vehicle >= 0) ids = {h.vehicle};
    std::ostringstream out;
    write_csv_row(out, {"vehicle", "samples", "sle_lateral_max", "sle_longitudinal_max", "label"});
    for (int id : ids) {
      const analysis::CentralitySeries s =
          analysis::centrality_series(frames, id, h.calibration.radius, h.calibration.lane_penalty);
      if (s.t.size() < 2) continue;
      const analysis::Sle e = analysis::sle(s);
      const analysis::SleFeatures f{e.max_lateral, e.max_longitudinal};
      write_csv_row(out, {std::to_string(id), std::to_string(s.t.size()), format_double(f.lateral),
                          format_double(f.longitudinal),
                          std::string(driver::to_string(analysis::classify_behavior(f, classifier)))});
    }
    write_file(dir / "classification.csv", out.str());
    return;
  }

  std::vector<driver::BehaviorParams> grid{cfg.behaviors.aggressive, cfg.behaviors.moderate, cfg.behaviors.conservative};
  if (h.grid_points >= 2) {
    for (const auto& [lat, lon] : grid_points(h.grid_points)) {
      grid.push_back(interpolate_axes(cfg.behaviors.conservative, cfg.behaviors.aggressive, lat, lon));
    }
  }
  report(progress, "sweeping " + std::to_string(grid.size()) + " parameter sets");
  const auto rows = analysis::parameter_sweep(grid, h.calibration, classifier, cfg.seed, h.calibration_seeds, h.workers);
  std::ostringstream out;
  analysis::write_sweep_csv(out, rows);
  write_file(dir / "behavior_sweep.csv", out.str());
}

void cmd_plot(const ExperimentConfig& cfg, const fs::path& dir) {
  if (cfg.harness.input.empty()) throw std::invalid_argument("plot needs an input CSV");
  std::ifstream in(cfg.harness.input);
  if (!in) throw std::runtime_error("cannot open " + cfg.harness.input);
  std::string first;
  std::getline(in, first);
  in.seekg(0);
  const std::string stem = fs::path(cfg.harness.input).stem().string();
  const std::vector<std::string> header = parse_csv_row(first);
  if (!header.empty() && header.front() == "train\\test") {
    write_file(dir / (stem + ".svg"), heatmap_svg(parse_matrix_csv(in), stem));
    return;
  }
  if (!header.empty() && header.front() == "run") {
    // Training log: one series per run, smoothed mission success.
    std::map<std::string, Series> series;
    std::vector<std::string> order;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto f = parse_csv_row(line);
      if (f.size() != header.size()) throw std::runtime_error("malformed training log row");
      if (!series.contains(f[0])) order.push_back(f[0]);
      Series& s = series[f[0]];
      s.name = f[0];
      s.x.push_back(std::stod(f[1]));
      s.y.push_back(std::stod(f[9]));
    }
    std::vector<Series> all;
    for (const auto& name : order) all.push_back(series[name]);
    write_file(dir / (stem + ".svg"), curves_svg(all, "smoothed mission success", "episode", "success rate"));
    return;
  }
  throw std::invalid_argument("plot: unrecognised CSV layout in " + cfg.harness.input);
}

}  // namespace

std::string resolved_config_text(const ExperimentConfig& cfg) { return nlohmann::json(cfg).dump(2) + "\n"; }

void save_checkpoint(const fs::path& path, const learn::Mlp<float>& net, std::int64_t steps,
                     const ExperimentConfig& cfg) {
  save_checkpoint_to(path, net, steps, cfg);
}

learn::Mlp<float> load_network(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  const learn::Checkpoint c = learn::read_checkpoint(in);
  learn::Mlp<float> net(c.sizes);
  if (net.param_count() != c.params.size()) throw std::runtime_error("checkpoint size mismatch in " + path.string());
  net.params() = c.params;
  return net;
}

fs::path run_command(const std::string& command, const ExperimentConfig& cfg, const fs::path& out_root,
                     const ProgressFn& progress) {
  if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end()) {
    throw std::invalid_argument("unknown command: " + command);
  }
  const fs::path dir = make_run_dir(out_root, command);
  try {
    write_file(dir / "resolved-config.json", resolved_config_text(cfg));
    if (command == "train") cmd_train(cfg, dir, progress);
    else if (command == "eval") cmd_eval(cfg, dir, progress);
    else if (command == "sweep") cmd_sweep(cfg, dir, progress);
    else if (command == "adapt-matrix") cmd_adapt_matrix(cfg, dir, progress);
    else if (command == "transfer") cmd_transfer(cfg, dir, progress);
    else if (command == "classify") cmd_classify(cfg, dir, progress);
    else cmd_plot(cfg, dir);
  } catch (...) {
    // A failed run leaves nothing behind.
    std::error_code ec;
    fs::remove_all(dir, ec);
    throw;
  }
  return dir;
}

}  // namespace altruist::harness
