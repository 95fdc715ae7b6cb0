// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <algorithm>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "altruist/analysis/classifier.hpp"
#include "altruist/common/csv.hpp"
#include "altruist/driver/idm.hpp"
#include "altruist/driver/mobil.hpp"
#include "altruist/harness/commands.hpp"
#include "altruist/harness/output.hpp"
#include "altruist/learn/ddqn.hpp"
#include "altruist/learn/q_function.hpp"
#include "altruist/reward/reward.hpp"
#include "support.hpp"

using namespace altruist;
namespace fs = std::filesystem;
namespace h = altruist::harness;

namespace {

// Tolerances and limits.
constexpr double kAlgebraRelTol = 1e-9;
constexpr double kGradRelTol = 1e-4;
constexpr double kFdStep = 1e-6;
constexpr int kGradNetworks = 20;
constexpr int kSafetyScenes = 1000;
constexpr int kEvalEpisodes = 100;
constexpr double kMaskedCrashMaxPct = 5.0;
constexpr double kLearnedSuccessMin = 0.7;
constexpr double kLearnedOverUntrained = 2.0;
constexpr int kSmoothingWindow = 100;
constexpr int kCalibrationSeeds = 20;
constexpr double kConstantSpeedSleMax = 1e-6;
// Mission weight of the learning runs; see README.
constexpr double kMissionWeight = 8.0;

struct Outcome {
  bool pass = false;
  std::string detail;
  // Failed only on a sub-condition documented as out of reach (README, "Acceptance status").
  bool documented_gap = false;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Collects failed checks of a criterion that asserts many values.
struct Checks {
  int total = 0;
  std::vector<std::string> failed;

  void expect(bool ok, const std::string& what) {
    ++total;
    if (!ok) failed.push_back(what);
  }
  void close(double got, double want, const std::string& what, double rel = kAlgebraRelTol) {
    const double err = std::abs(got - want);
    const bool ok = want == 0.0 ? err <= rel : err <= rel * std::abs(want);
    expect(ok, what + " got " + format_double(got) + " want " + format_double(want));
  }
  std::string summary() const {
    std::string s = std::to_string(total - static_cast<int>(failed.size())) + "/" + std::to_string(total) + " checks";
    for (std::size_t i = 0; i < failed.size() && i < 5; ++i) s += "; " + failed[i];
    return s;
  }
};

// Criterion 1 ------------------------------------------------------------------------

Outcome model_algebra() {
  const auto t0 = Clock::now();
  Checks c;
  const double inf = std::numeric_limits<double>::infinity();

  // Car following.
  const driver::BehaviorParams typ = driver::typical_params();
  const driver::BehaviorParams mod = driver::moderate_params();
  c.close(driver::idm_acceleration(mod.v0, 0.0, inf, mod), 0.0, "idm free road at v0");
  c.close(driver::idm_acceleration(0.0, 0.0, inf, mod), mod.a_max, "idm standstill");
  c.close(driver::idm_desired_gap(30.0, 0.0, typ), 2.0 + 30.0 * 1.5, "d* at 30 m/s");
  c.close(driver::idm_acceleration(30.0, 0.0, 47.0, typ), -1.0, "idm at desired gap");
  c.close(driver::idm_desired_gap(20.0, 2.0, typ), 2.0 + 30.0 + 40.0 / (2.0 * std::sqrt(1.5)), "d* closing");
  c.close(driver::idm_desired_gap(1.0, -50.0, typ), typ.min_gap, "d* floor");

  // Lane changing.
  auto accs = [](double ego, double nf, double of) {
    driver::LaneChangeAccelerations a;
    a.ego_after = ego;
    a.new_follower_after = nf;
    a.old_follower_after = of;
    return a;
  };
  c.close(driver::mobil_incentive(accs(0.1, -2.0, -2.0), driver::aggressive_params()), 0.1, "mobil aggressive");
  c.expect(driver::mobil_decide(accs(0.1, -2.0, -2.0), driver::aggressive_params()) == driver::LaneDecision::Change,
           "mobil aggressive changes");
  c.close(driver::mobil_incentive(accs(0.5, -0.3, -0.3), driver::conservative_params()), -0.1, "mobil conservative");
  c.expect(driver::mobil_decide(accs(10.0, -5.0, 0.0), typ) == driver::LaneDecision::Stay, "mobil safety veto");

  // Rewards.
  reward::RewardConfig speed;
  speed.w_speed = 1.0;
  speed.w_crash = 0.0;
  speed.w_lane_change = 0.0;
  {
    sim::World w = testsupport::straight_world();
    testsupport::add_av(w, 0, 100.0, 30.0);
    c.close(reward::ego_reward(w, 0, speed), 1.0, "speed reward at v_max");
    w.vehicles[0].v = 15.0;
    c.close(reward::ego_reward(w, 0, speed), 0.5, "speed reward at half v_max");
    w.vehicles[0].lane_changes_in_tick = 1;
    c.close(reward::ego_reward(w, 0, reward::RewardConfig{}), 0.4 * 0.5 - 0.05, "default metric set");
    reward::RewardConfig crash;
    crash.w_speed = 0.0;
    crash.w_lane_change = 0.0;
    w.vehicles[0].crashed_in_tick = true;
    c.close(reward::ego_reward(w, 0, crash), -1.0, "crash reward");
  }
  {
    sim::World w = testsupport::straight_world();
    testsupport::add_av(w, 0, 100.0, 20.0);
    c.close(reward::social_reward(w, 0, speed), 0.0, "social reward alone");
    testsupport::add_hv(w, 0, 102.0, 30.0);
    c.close(reward::social_reward(w, 0, speed), 0.5, "social reward at distance 2");
  }
  {
    sim::World w = testsupport::straight_world();
    testsupport::add_av(w, 0, 100.0, 20.0);
    sim::Vehicle& m = testsupport::add_hv(w, 0, 104.0, 0.0);
    m.mission = sim::Mission::Merge;
    m.mission_status = sim::MissionStatus::Accomplished;
    m.mission_resolved_t = w.t;
    w.mission_vehicle_id = m.id;
    reward::RewardConfig rc = speed;
    rc.hv_mission_weight = 8.0;
    rc.mu = 2.0;
    c.close(reward::mission_reward(w, 0, 1, rc), 8.0 / (4.0 * 4.0), "mission reward");
  }
  c.close(reward::total_reward(0.3, 0.9, 0.0), 0.3, "total reward phi 0");
  c.close(reward::total_reward(1.0, 1.0, std::numbers::pi / 4), std::sqrt(2.0), "total reward phi pi/4");

  // Evaluation metrics.
  c.close(h::adaptation_error(0, 300, 300), 0.0, "A_error best");
  c.close(h::adaptation_error(100, 0, 300), 100.0, "A_error worst");
  c.close(h::adaptation_error(30, 150, 300), 20.0 + 50.0 / 3.0, "A_error mid");
  c.close(h::pg_safety(10, 5, 100), 0.05, "PG_safety");
  c.close(h::pg_safety(31.2, 0.2, 1000), 0.031, "PG_safety desk");
  c.close(*h::pg_efficiency(330, 300), 10.0, "PG_efficiency");
  c.close(*h::pg_efficiency(397, 359), 100.0 * 38.0 / 359.0, "PG_efficiency desk");
  c.expect(std::abs(*h::pg_efficiency(397, 359) - 10.58) < 0.005, "PG_efficiency rounds to 10.58");
  c.expect(!h::pg_efficiency(100, 0).has_value(), "PG_efficiency undefined for DT_E 0");

  // Learning targets and exploration.
  {
    learn::Mlp<double> online({1, 5}), target({1, 5});
    online.params()[online.bias_offset(0)] = 1.0;
    target.params()[target.bias_offset(0)] = 2.0;
    target.params()[target.bias_offset(0) + 1] = 10.0;
    learn::Batch<double> b;
    b.size = 3;
    b.input = 1;
    b.states = b.next_states = {0, 0, 0};
    b.actions = {0, 1, 2};
    b.rewards = {-1.0, 0.7, 1.0};
    b.terminal = {1, 0, 0};
    const auto y = learn::ddqn_targets(b, online, target, 0.95);
    c.close(y[0], -1.0, "ddqn terminal");
    c.close(y[1], 0.7 + 0.95 * 2.0, "ddqn bootstrap");
    c.close(y[2], 2.9, "ddqn online argmax");
    c.close(learn::ddqn_targets(b, online, target, 0.0)[1], 0.7, "ddqn gamma 0");
  }
  const learn::EpsilonSchedule eps{1.0, 0.05, 1000.0};
  c.close(learn::epsilon(0, eps), 1.0, "epsilon start");
  c.close(learn::epsilon(500, eps), 0.525, "epsilon midway");
  c.close(learn::epsilon(5000, eps), 0.05, "epsilon floor");

  const double secs = seconds_since(t0);
  c.expect(secs < 1.0, "runtime " + format_double(secs) + " s >= 1 s");
  return {c.failed.empty(), c.summary() + ", " + format_double(std::round(secs * 1e4) / 1e4) + " s"};
}

// Criterion 2 ------------------------------------------------------------------------

Outcome gradient_check() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> width(2, 9), depth(1, 3), batch(1, 8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int n = 0; n < kGradNetworks; ++n) {
    std::vector<int> sizes{width(rng)};
    for (int d = depth(rng); d > 0; --d) sizes.push_back(width(rng));
    sizes.push_back(sim::kActionCount);
    learn::Mlp<double> net(sizes);
    net.init(rng);
    learn::Batch<double> b;
    b.size = batch(rng);
    b.input = sizes.front();
    for (int i = 0; i < b.size * b.input; ++i) {
      b.states.push_back(u(rng));
      b.next_states.push_back(u(rng));
    }
    std::vector<double> targets;
    for (int i = 0; i < b.size; ++i) {
      b.actions.push_back(std::uniform_int_distribution<int>(0, sim::kActionCount - 1)(rng));
      b.rewards.push_back(u(rng));
      b.terminal.push_back(0);
      targets.push_back(2.0 * u(rng));
    }
    const auto lg = learn::loss_and_grad(net, b, targets);
    for (std::size_t p = 0; p < net.param_count(); ++p) {
      const double saved = net.params()[p];
      net.params()[p] = saved + kFdStep;
      const double up = learn::loss_and_grad(net, b, targets).loss;
      net.params()[p] = saved - kFdStep;
      const double down = learn::loss_and_grad(net, b, targets).loss;
      net.params()[p] = saved;
      const double fd = (up - down) / (2 * kFdStep);
      const double denom = std::max({std::abs(fd), std::abs(lg.grad[p]), 1e-6});
      worst = std::max(worst, std::abs(fd - lg.grad[p]) / denom);
    }
  }
  const double secs = seconds_since(t0);
  return {worst < kGradRelTol && secs < 10.0, std::to_string(kGradNetworks) + " networks, max relative error " +
                                                  format_double(worst) + ", " + format_double(std::round(secs * 100) / 100) +
                                                  " s"};
}

// Criterion 3 ------------------------------------------------------------------------

Outcome safety_soundness() {
  const auto t0 = Clock::now();
  const safety::SafetyConfig cfg;
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int> action(0, sim::kActionCount - 1), warm(0, 20), kind(0, 1), hvs(2, 6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::vector<double> thresholds{0.0, 0.5, 1.0, 1.5, 2.5, 5.0};
  int scenes = 0, decisions = 0, collisions = 0, fallbacks = 0, non_monotone = 0;
  for (std::uint64_t seed = 1; scenes < kSafetyScenes; ++seed) {
    sim::ScenarioConfig sc;
    sc.kind = kind(rng) ? sim::ScenarioKind::Merge : sim::ScenarioKind::Exit;
    sc.n_hvs = hvs(rng);
    sim::World w = sim::build_scenario(sc, driver::BehaviorMix::uniform_presets(), seed);
    for (int k = warm(rng); k > 0 && !sim::is_terminal(w); --k) {
      sim::ActionMap m;
      for (int id : w.live_av_ids()) m[id] = sim::action_from_index(action(rng));
      sim::advance(w, m);
    }
    if (sim::is_terminal(w)) continue;
    ++scenes;
    for (int id : w.live_av_ids()) {
      safety::ActionValues q;
      for (double& x : q) x = u(rng);
      const safety::FilterResult r = safety::filter_actions(w, id, q, cfg, safety::Mode::Test, 0.0, rng);
      ++decisions;
      if (r.fallback) {
        ++fallbacks;
      } else {
        // Replay the executed action under the projected dynamics.
        sim::World p = w.projection_copy();
        sim::ActionMap first = sim::idle_actions(p);
        first[id] = r.chosen;
        const int steps = static_cast<int>(std::floor(cfg.safe_th / p.cfg.dt));
        for (int k = 0; k < steps; ++k) {
          sim::step_unchecked(p, k == 0 ? first : sim::idle_actions(p));
          if (p.vehicle(id).crashed) {
            ++collisions;
            break;
          }
          if (p.vehicle(id).departed) break;
        }
      }
      safety::ActionValues scores;
      for (sim::MetaAction a : sim::kAllActions) {
        scores[static_cast<std::size_t>(sim::action_index(a))] = safety::safety_score(w, id, a, cfg);
      }
      std::vector<bool> previous(sim::kActionCount, true);
      for (double th : thresholds) {
        for (int a = 0; a < sim::kActionCount; ++a) {
          const bool safe = th == 0.0 || scores[static_cast<std::size_t>(a)] >= th;
          if (safe && !previous[static_cast<std::size_t>(a)]) ++non_monotone;
          previous[static_cast<std::size_t>(a)] = safe;
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  return {collisions == 0 && non_monotone == 0 && secs < 30.0,
          std::to_string(scenes) + " scenes, " + std::to_string(decisions) + " decisions, " +
              std::to_string(collisions) + " projected collisions of masked picks, " + std::to_string(fallbacks) +
              " all-unsafe fallbacks, " + std::to_string(non_monotone) + " monotonicity violations, " +
              format_double(std::round(secs * 10) / 10) + " s"};
}

// Desk-scale policies shared by criteria 4 to 6 -----------------------------------------

h::ExperimentConfig desk_config() {
  h::ExperimentConfig c;  // merge, 2 AVs, 6 HVs, mixed population, 600 episodes
  c.reward.phi = std::numbers::pi / 4;
  c.reward.hv_mission_weight = kMissionWeight;
  c.harness.eval_episodes = kEvalEpisodes;
  c.harness.smoothing_window = kSmoothingWindow;
  return c;
}

struct Trained {
  learn::TrainResult social;
  std::optional<learn::TrainResult> egoistic;
  std::optional<learn::TrainResult> unmasked;
  double social_secs = 0.0;
};

Trained& trained() {
  static std::optional<Trained> t;
  if (!t) {
    const auto t0 = Clock::now();
    std::cerr << "training the social desk-scale policy\n";
    t = Trained{learn::train_marl(desk_config().train_setup()), std::nullopt, std::nullopt, 0.0};
    t->social_secs = seconds_since(t0);
  }
  return *t;
}

const learn::TrainResult& egoistic() {
  Trained& t = trained();
  if (!t.egoistic) {
    std::cerr << "training the egoistic desk-scale policy\n";
    h::ExperimentConfig c = desk_config();
    c.reward.phi = c.harness.phi_egoistic;
    t.egoistic = learn::train_marl(c.train_setup());
  }
  return *t.egoistic;
}

// Same pipeline with the mask disabled in training and evaluation.
const learn::TrainResult& unmasked() {
  Trained& t = trained();
  if (!t.unmasked) {
    std::cerr << "training the unmasked desk-scale policy\n";
    h::ExperimentConfig c = desk_config();
    c.safety.safe_th = 0.0;
    t.unmasked = learn::train_marl(c.train_setup());
  }
  return *t.unmasked;
}

std::string pct(double x) { return format_double(std::round(x * 100) / 100) + "%"; }

// Criterion 4 ------------------------------------------------------------------------

Outcome safety_ablation() {
  const auto t0 = Clock::now();
  const h::ExperimentConfig c = desk_config();
  const std::vector<std::uint64_t> seeds = h::eval_seeds(c.seed, kEvalEpisodes);
  h::EvalSetup masked = h::eval_setup(c);
  h::EvalSetup open = masked;
  open.safety.safe_th = 0.0;
  const h::Policy with_mask = h::Policy::network(trained().social.q.online);
  const h::Policy without_mask = h::Policy::network(unmasked().q.online);
  const h::Aggregate on = h::aggregate(h::run_episodes(with_mask, masked, seeds, c.harness.workers));
  const h::Aggregate off = h::aggregate(h::run_episodes(without_mask, open, seeds, c.harness.workers));
  // Informational: the masked-trained policy with the mask switched off at test time.
  const h::Aggregate stripped = h::aggregate(h::run_episodes(with_mask, open, seeds, c.harness.workers));
  return {on.crash_pct < off.crash_pct && on.crash_pct <= kMaskedCrashMaxPct,
          "crash " + pct(on.crash_pct) + " trained and tested with safe_th=" + format_double(masked.safety.safe_th) +
              " vs " + pct(off.crash_pct) + " with safe_th=0 throughout (masked-trained policy unmasked at test: " +
              pct(stripped.crash_pct) + "), " + std::to_string(kEvalEpisodes) + " episodes, " +
              format_double(std::round(seconds_since(t0))) + " s"};
}

// Criterion 5 ------------------------------------------------------------------------

Outcome learning_sanity() {
  const h::ExperimentConfig c = desk_config();
  const learn::TrainResult& t = trained().social;
  std::vector<double> mission;
  for (const learn::EpisodeLog& l : t.log) mission.push_back(l.mission);
  const double learned = h::smooth(mission, kSmoothingWindow).back();

  // Greedy policy of the initial network, evaluated under the same mask.
  learn::TrainSetup untrained_setup = c.train_setup();
  untrained_setup.learner.episodes = 0;
  const h::Policy untrained = h::Policy::network(learn::train_marl(untrained_setup).q.online);
  const h::Aggregate a =
      h::aggregate(h::run_episodes(untrained, h::eval_setup(c), h::eval_seeds(c.seed, kEvalEpisodes), c.harness.workers));
  const double base = 1.0 - a.mission_fail_pct / 100.0;
  Outcome o;
  o.pass = learned >= kLearnedSuccessMin && learned >= kLearnedOverUntrained * base;
  o.documented_gap = !o.pass && learned >= kLearnedSuccessMin && kLearnedOverUntrained * base > 1.0;
  o.detail = "smoothed success " + format_double(std::round(learned * 1000) / 1000) + " after " +
             std::to_string(t.log.size()) + " episodes, untrained greedy " + format_double(std::round(base * 1000) / 1000) +
             " (needs >= " + format_double(kLearnedSuccessMin) + " and >= " + format_double(kLearnedOverUntrained) +
             "x), training " + format_double(std::round(trained().social_secs)) + " s";
  if (o.documented_gap) o.detail += "; the ratio would need a success rate above 1";
  return o;
}

// Criterion 6 ------------------------------------------------------------------------

Outcome sensitivity_direction() {
  const auto t0 = Clock::now();
  h::ExperimentConfig c = desk_config();
  const h::Policy social = h::Policy::network(trained().social.q.online);
  const h::Policy ego = h::Policy::network(egoistic().q.online);
  const std::vector<std::uint64_t> seeds = h::eval_seeds(c.seed, kEvalEpisodes);
  struct Gain {
    double safety;
    std::optional<double> efficiency;
    h::Aggregate s, e;
  };
  auto gain = [&](h::Population pop) {
    const h::EvalSetup setup = h::eval_setup(c, c.scenario.kind, pop);
    Gain g;
    g.s = h::aggregate(h::run_episodes(social, setup, seeds, c.harness.workers));
    g.e = h::aggregate(h::run_episodes(ego, setup, seeds, c.harness.workers));
    g.safety = h::pg_safety(g.e.crash_pct, g.s.crash_pct, kEvalEpisodes);
    g.efficiency = h::pg_efficiency(g.s.dt_mean, g.e.dt_mean);
    return g;
  };
  const Gain agg = gain(h::Population::Aggressive);
  const Gain con = gain(h::Population::Conservative);
  const bool eff_ok = agg.efficiency && con.efficiency && *agg.efficiency >= *con.efficiency;
  auto describe = [](const Gain& g) {
    return "PG_safety " + format_double(g.safety) + " (C_S " + pct(g.s.crash_pct) + ", C_E " + pct(g.e.crash_pct) +
           "), PG_efficiency " + (g.efficiency ? format_double(std::round(*g.efficiency * 100) / 100) + "%" : "n/a") +
           " (DT_S " + format_double(std::round(g.s.dt_mean)) + " m, DT_E " + format_double(std::round(g.e.dt_mean)) +
           " m)";
  };
  return {agg.safety >= con.safety && eff_ok, "aggressive: " + describe(agg) + "; conservative: " + describe(con) +
                                                  ", " + format_double(std::round(seconds_since(t0))) + " s"};
}

// Criterion 7 ------------------------------------------------------------------------

Outcome classifier_ordering() {
  const auto t0 = Clock::now();
  const analysis::CalibrationConfig cfg;
  const analysis::Calibration cal = analysis::calibrate(cfg, 1, kCalibrationSeeds);
  const bool lon = cal.aggressive.longitudinal > cal.moderate.longitudinal &&
                   cal.moderate.longitudinal > cal.conservative.longitudinal;
  const bool lat = cal.aggressive.lateral > cal.moderate.lateral && cal.moderate.lateral > cal.conservative.lateral;

  analysis::CalibrationConfig still = cfg;
  still.background_speed_min = still.background_speed_max = still.ego_speed = 20.0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < static_cast<std::uint64_t>(kCalibrationSeeds); ++seed) {
    sim::World w = analysis::build_calibration_world(still, driver::conservative_params(), seed);
    w.vehicles[0].scripted = true;
    worst = std::max(worst, analysis::sle(analysis::rollout_series(w, still)).max_longitudinal);
  }
  const double secs = seconds_since(t0);
  auto triple = [](double a, double m, double c) {
    auto r = [](double x) { return format_double(std::round(x * 1e4) / 1e4); };
    return r(a) + " > " + r(m) + " > " + r(c);
  };
  return {lon && worst < kConstantSpeedSleMax && secs < 300.0,
          "longitudinal " +
              triple(cal.aggressive.longitudinal, cal.moderate.longitudinal, cal.conservative.longitudinal) +
              (lon ? "" : " (not ordered)") + ", lateral " +
              triple(cal.aggressive.lateral, cal.moderate.lateral, cal.conservative.lateral) +
              (lat ? "" : " (not ordered)") + ", constant-speed SLE_o max " + format_double(worst) + ", " +
              format_double(std::round(secs)) + " s"};
}

// Criterion 8 ------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char ch : s) {
    if (ch == '\'') out += "'\\''";
    else out += ch;
  }
  return out + "'";
}

// Runs the CLI and returns the run directory it printed.
fs::path run_cli(const std::string& cli, const std::vector<std::string>& args, const fs::path& out_root) {
  std::string cmd = shell_quote(cli) + " -q --out-dir " + shell_quote(out_root.string());
  for (const std::string& a : args) cmd += " " + shell_quote(a);
  const fs::path stdout_file = out_root / "stdout.txt";
  fs::create_directories(out_root);
  cmd += " > " + shell_quote(stdout_file.string());
  if (std::system(cmd.c_str()) != 0) throw std::runtime_error("command failed: " + cmd);
  std::string line, last;
  std::ifstream in(stdout_file);
  while (std::getline(in, line)) {
    if (!line.empty()) last = line;
  }
  return last;
}

Outcome determinism(const std::string& cli, const fs::path& work) {
  const auto t0 = Clock::now();
  fs::remove_all(work);
  fs::create_directories(work);
  nlohmann::json base = {
      {"seed", 5},
      {"scenario", {{"n_hvs", 4}}},
      {"learner", {{"episodes", 4}, {"hidden", {16}}, {"batch", 8}, {"buffer", 400}, {"pre_store", 1}}},
      {"harness",
       {{"eval_episodes", 3},
        {"sweep_points", 2},
        {"phi_candidates", {0.0, 0.7853981633974483}},
        {"calibration_seeds", 2},
        {"grid_points", 2},
        {"smoothing_window", 2}}}};
  h::write_file(work / "base.json", base.dump(2));
  {
    std::ofstream f(work / "cells.csv");
    f << "train,test,crash_pct,dt\nmerge/mixed,merge/mixed,4,310\nmerge/mixed,exit/mixed,12,250\n";
  }
  const std::string cfg = (work / "base.json").string();
  const fs::path first = work / "first", second = work / "second";

  std::vector<std::pair<std::string, fs::path>> dirs;
  auto run = [&](std::vector<std::string> args) {
    const std::string command = args.front();
    args.insert(args.begin(), {"--config", cfg});
    dirs.emplace_back(command, run_cli(cli, args, first));
    return dirs.back().second;
  };
  const std::string ckpt = (run({"train"}) / "checkpoint.bin").string();
  const fs::path matrix_dir = run({"adapt-matrix", "--synthetic", (work / "cells.csv").string(), "--rows",
                                   "merge/mixed", "--cols", "merge/mixed", "exit/mixed"});
  run({"eval", "--checkpoint", ckpt});
  run({"eval", "--policy", "random"});
  run({"sweep", "--mode", "axis", "--social", ckpt, "--egoistic", ckpt});
  run({"sweep", "--mode", "phi"});
  run({"adapt-matrix", "--rows", "merge/mixed", "--cols", "merge/mixed", "exit/mixed"});
  run({"transfer"});
  run({"classify"});
  run({"plot", (matrix_dir / "a_error.csv").string()});

  // Second pass: nothing but the emitted resolved config.
  int compared = 0, csvs = 0;
  std::vector<std::string> diffs;
  for (const auto& [command, d] : dirs) {
    const fs::path again = run_cli(cli, {"--config", (d / "resolved-config.json").string(), command}, second);
    for (const auto& e : fs::directory_iterator(d)) {
      const fs::path other = again / e.path().filename();
      ++compared;
      if (e.path().extension() == ".csv") ++csvs;
      if (!fs::exists(other) || slurp(e.path()) != slurp(other)) {
        diffs.push_back(d.filename().string() + "/" + e.path().filename().string());
      }
    }
    for (const auto& e : fs::directory_iterator(again)) {
      if (!fs::exists(d / e.path().filename())) diffs.push_back(again.filename().string() + "/" + e.path().filename().string() + " (extra)");
    }
  }
  std::string detail = std::to_string(dirs.size()) + " runs, " + std::to_string(compared) + " files (" +
                       std::to_string(csvs) + " CSV) compared, " + std::to_string(diffs.size()) + " differ";
  for (std::size_t i = 0; i < diffs.size() && i < 5; ++i) detail += "; " + diffs[i];
  detail += ", " + format_double(std::round(seconds_since(t0))) + " s";
  return {diffs.empty(), detail};
}

// Criterion 9 ------------------------------------------------------------------------

Outcome adaptation_matrix(bool full, const fs::path& work) {
  const auto t0 = Clock::now();
  Checks c;
  // Synthetic 8x8 through the command path, compared with an independent evaluation.
  fs::remove_all(work);
  fs::create_directories(work);
  const std::vector<h::Domain> d = h::all_domains();
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> crash(0.0, 60.0), dist(80.0, 420.0);
  std::vector<std::vector<std::pair<double, double>>> v(d.size());
  std::ostringstream cells;
  cells << "train,test,crash_pct,dt\n";
  for (std::size_t r = 0; r < d.size(); ++r) {
    for (std::size_t k = 0; k < d.size(); ++k) {
      v[r].emplace_back(crash(rng), dist(rng));
      cells << h::domain_name(d[r]) << ',' << h::domain_name(d[k]) << ',' << format_double(v[r][k].first) << ','
            << format_double(v[r][k].second) << '\n';
    }
  }
  h::write_file(work / "cells.csv", cells.str());
  h::ExperimentConfig cfg;
  cfg.harness.synthetic = (work / "cells.csv").string();
  const fs::path dir = h::run_command("adapt-matrix", cfg, work);
  std::ifstream in(dir / "a_error.csv");
  const h::LabeledMatrix m = h::parse_matrix_csv(in);
  c.expect(m.values.size() == d.size() * d.size(), "matrix shape");
  for (std::size_t k = 0; k < d.size() && m.values.size() == d.size() * d.size(); ++k) {
    double dt_max = 0.0;
    for (std::size_t r = 0; r < d.size(); ++r) dt_max = std::max(dt_max, v[r][k].second);
    for (std::size_t r = 0; r < d.size(); ++r) {
      const double want = (2.0 / 3.0) * v[r][k].first + (1.0 / 3.0) * 100.0 * (dt_max - v[r][k].second) / dt_max;
      c.close(m.at(r, k), want, "cell " + std::to_string(r) + "," + std::to_string(k), 1e-12);
    }
  }
  std::string detail = "synthetic 8x8: " + c.summary();
  bool pass = c.failed.empty();

  if (full) {
    h::ExperimentConfig desk = desk_config();
    const h::AdaptationMatrix am = h::adaptation_matrix(desk, d, d, [](const std::string& s) { std::cerr << s << '\n'; });
    const double diag = am.diagonal_mean(), off = am.off_diagonal_mean();
    pass = pass && diag <= off;
    detail += "; full 8x8 diagonal mean " + format_double(std::round(diag * 100) / 100) + " vs off-diagonal " +
              format_double(std::round(off * 100) / 100);
    std::ofstream(work / "full_a_error.csv") << h::matrix_csv(h::matrix_table(am, h::MatrixField::AError));
  } else {
    detail += "; full 8x8 not run (pass --full-matrix)";
  }
  detail += ", " + format_double(std::round(seconds_since(t0))) + " s";
  return {pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  bool full_matrix = false;
  std::string cli = ALTRUIST_CLI_PATH;
  std::string work = (fs::temp_directory_path() / "altruist-acceptance").string();
  std::vector<std::string> only;
  app.add_flag("--full-matrix", full_matrix, "also train and evaluate the full 8x8 adaptation matrix");
  app.add_option("--cli", cli, "CLI binary for the determinism check");
  app.add_option("--work-dir", work, "scratch directory");
  app.add_option("--only", only, "run only these criteria");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"model-algebra", model_algebra},
      {"gradient-check", gradient_check},
      {"safety-mask-soundness", safety_soundness},
      {"safety-ablation", safety_ablation},
      {"learning-sanity", learning_sanity},
      {"sensitivity-direction", sensitivity_direction},
      {"classifier-ordering", classifier_ordering},
      {"determinism", [&] { return determinism(cli, fs::path(work) / "determinism"); }},
      {"adaptation-matrix", [&] { return adaptation_matrix(full_matrix, fs::path(work) / "matrix"); }},
  };
  int failures = 0, documented = 0;
  fs::create_directories(work);
  std::ofstream report(fs::path(work) / "report.txt");
  for (const auto& [name, run] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++(o.documented_gap ? documented : failures);
    const std::string line = std::string(o.pass ? "PASS " : "FAIL ") + name + ": " + o.detail +
                             (o.documented_gap ? " [documented gap, not counted in the exit status]" : "");
    std::cout << line << std::endl;
    report << line << std::endl;
  }
  const std::string tally = std::to_string(failures) + " failed, " + std::to_string(documented) + " failed on documented gaps";
  std::cout << tally << std::endl;
  report << tally << std::endl;
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
