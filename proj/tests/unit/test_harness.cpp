#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

#include "altruist/harness/commands.hpp"
#include "altruist/harness/output.hpp"

using namespace altruist;
using namespace altruist::harness;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.scenario.n_hvs = 3;
  c.scenario.sim.horizon = 15.0;
  c.learner.hidden = {16};
  c.learner.batch = 8;
  c.learner.buffer = 400;
  c.learner.pre_store = 1;
  c.learner.episodes = 0;
  c.harness.eval_episodes = 6;
  c.harness.smoothing_window = 3;
  return c;
}

EpisodeMetrics episode(bool crashed, bool has_mission, bool failed, double dt) {
  EpisodeMetrics m;
  m.crashed = crashed;
  m.has_mission = has_mission;
  m.mission_failed = failed;
  m.distance_traveled = dt;
  return m;
}

// Independent A_error: weighted crash rate plus weighted relative distance shortfall.
double a_error_oracle(double c, double dt, double dt_max) {
  return (2.0 / 3.0) * c + (1.0 / 3.0) * 100.0 * (dt_max - dt) / dt_max;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("altruist-test-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("safety gain examples") {
  CHECK(pg_safety(10, 5, 100) == doctest::Approx(0.05));
  CHECK(pg_safety(31.2, 0.2, 1000) == doctest::Approx(0.031));
  CHECK(pg_safety(7, 7, 50) == 0.0);
}

TEST_CASE("efficiency gain examples") {
  CHECK(*pg_efficiency(330, 300) == doctest::Approx(10.0));
  CHECK(*pg_efficiency(397, 359) == doctest::Approx(10.58).epsilon(1e-3));
  CHECK(*pg_efficiency(250, 250) == 0.0);
  CHECK_FALSE(pg_efficiency(100, 0).has_value());
}

TEST_CASE("adaptation error examples and affinity") {
  CHECK(adaptation_error(0, 300, 300) == doctest::Approx(0.0));
  CHECK(adaptation_error(100, 0, 300) == doctest::Approx(100.0));
  CHECK(adaptation_error(30, 150, 300) == doctest::Approx(36.67).epsilon(1e-3));
  // Affine in each argument: midpoints map to midpoints.
  const double a = adaptation_error(10, 120, 300), b = adaptation_error(50, 120, 300);
  CHECK(adaptation_error(30, 120, 300) == doctest::Approx((a + b) / 2));
  const double x = adaptation_error(20, 60, 300), y = adaptation_error(20, 240, 300);
  CHECK(adaptation_error(20, 150, 300) == doctest::Approx((x + y) / 2));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 200; ++i) {
    const double c = 100 * u(rng), dt_max = 1 + 500 * u(rng), dt = dt_max * u(rng);
    CHECK(adaptation_error(c, dt, dt_max) == doctest::Approx(a_error_oracle(c, dt, dt_max)));
  }
  CHECK_THROWS_AS(adaptation_error(10, 10, 0), std::invalid_argument);
  CHECK_THROWS_AS(adaptation_error(10, 400, 300), std::invalid_argument);
  CHECK_THROWS_AS(adaptation_error(10, 100, 300, 0.5, 0.6), std::invalid_argument);
}

TEST_CASE("aggregate accounting") {
  SUBCASE("all crashed") {
    const Aggregate a = aggregate(std::vector<EpisodeMetrics>(4, episode(true, false, false, 10)));
    CHECK(a.crash_pct == 100.0);
    CHECK(a.mission_episodes == 0);
    CHECK(a.mission_fail_pct == 0.0);
  }
  SUBCASE("crash and no-crash rates sum to 100") {
    std::vector<EpisodeMetrics> eps{episode(true, true, true, 100), episode(false, true, false, 200),
                                    episode(false, false, false, 300), episode(true, true, false, 400)};
    const Aggregate a = aggregate(eps);
    CHECK(a.crash_pct == doctest::Approx(50.0));
    CHECK(100.0 - a.crash_pct == doctest::Approx(100.0 * 2 / 4));
    // Mission failures count only over episodes that had a mission vehicle.
    CHECK(a.mission_episodes == 3);
    CHECK(a.mission_failures == 1);
    CHECK(a.mission_fail_pct == doctest::Approx(100.0 / 3));
    CHECK(a.dt_mean == doctest::Approx(250.0));
    CHECK(a.episodes == 4);
  }
  CHECK_THROWS_AS(aggregate({}), std::invalid_argument);
}

TEST_CASE("evaluation episodes") {
  const ExperimentConfig c = small_config();
  const EvalSetup s = eval_setup(c);
  const std::vector<std::uint64_t> seeds = eval_seeds(c.seed, 4);

  SUBCASE("same seeds give identical metrics") {
    CHECK(run_episodes(Policy::random(), s, seeds, 1) == run_episodes(Policy::random(), s, seeds, 1));
  }
  SUBCASE("parallel matches serial") {
    CHECK(run_episodes(Policy::random(), s, seeds, 3) == run_episodes_serial(Policy::random(), s, seeds));
  }
  SUBCASE("seeds are shared across policies") {
    const auto a = run_episodes(Policy::random(), s, seeds, 1);
    const auto b = run_episodes(Policy::constant(sim::MetaAction::Idle), s, seeds, 1);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].seed == b[i].seed);
  }
  SUBCASE("network shape mismatch") {
    CHECK_THROWS_AS(run_episodes(Policy::network(learn::Mlp<float>({10, 4, 5})), s, seeds, 1), std::invalid_argument);
    CHECK_THROWS_AS(run_episode(Policy::network(learn::Mlp<float>({10, 4, 5})), s, seeds[0]), std::invalid_argument);
  }
  SUBCASE("every episode has a mission vehicle on merge") {
    for (const EpisodeMetrics& m : run_episodes(Policy::random(), s, seeds, 1)) {
      CHECK(m.has_mission);
      CHECK(m.steps > 0);
      CHECK(m.distance_traveled > 0.0);
    }
  }
  CHECK_THROWS_AS(run_episodes(Policy::random(), s, {}, 1), std::invalid_argument);
}

TEST_CASE("domains") {
  CHECK(all_domains().size() == 8);
  CHECK(domain_from_string("merge/aggressive") == Domain{sim::ScenarioKind::Merge, Population::Aggressive});
  CHECK(domain_from_string("f_e/b_c") == Domain{sim::ScenarioKind::Exit, Population::Conservative});
  for (const Domain& d : all_domains()) CHECK(domain_from_string(domain_name(d)) == d);
  CHECK_THROWS_AS(domain_from_string("drive/mixed"), std::invalid_argument);
  CHECK_THROWS_AS(domain_from_string("merge"), std::invalid_argument);
  CHECK_THROWS_AS(domain_from_string("merge/reckless"), std::invalid_argument);
  CHECK(parse_domains({}).size() == 8);
}

TEST_CASE("synthetic matrix equals the hand computation") {
  const std::vector<Domain> d = parse_domains({"merge/aggressive", "exit/conservative"});
  std::istringstream in(
      "train,test,crash_pct,dt\n"
      "merge/aggressive,merge/aggressive,10,300\n"
      "merge/aggressive,exit/conservative,40,200\n"
      "exit/conservative,merge/aggressive,20,150\n"
      "exit/conservative,exit/conservative,0,250\n");
  const AdaptationMatrix m = assemble_matrix(d, d, read_synthetic_cells(in, d, d), 2.0 / 3, 1.0 / 3);
  CHECK(m.dt_max[0] == 300.0);
  CHECK(m.dt_max[1] == 250.0);
  CHECK(m.error(0, 0) == doctest::Approx(a_error_oracle(10, 300, 300)));
  CHECK(m.error(0, 1) == doctest::Approx(a_error_oracle(40, 200, 250)));
  CHECK(m.error(1, 0) == doctest::Approx(a_error_oracle(20, 150, 300)));
  CHECK(m.error(1, 1) == doctest::Approx(0.0));
  CHECK(m.error(0, 0) == doctest::Approx(6.6667).epsilon(1e-4));
  CHECK(m.error(1, 0) == doctest::Approx(30.0));
  CHECK(m.diagonal_mean() == doctest::Approx((m.error(0, 0) + m.error(1, 1)) / 2));
  CHECK(m.off_diagonal_mean() == doctest::Approx((m.error(0, 1) + m.error(1, 0)) / 2));
}

TEST_CASE("matrix edge cases") {
  const std::vector<Domain> one = parse_domains({"exit/mixed"});
  SUBCASE("1x1") {
    const AdaptationMatrix m = assemble_matrix(one, one, {{true, 25, 180, {}}}, 2.0 / 3, 1.0 / 3);
    CHECK(m.error(0, 0) == doctest::Approx(2.0 / 3 * 25));
    CHECK(std::isnan(m.off_diagonal_mean()));
  }
  SUBCASE("missing synthetic cells stay undefined") {
    const std::vector<Domain> two = parse_domains({"merge/mixed", "exit/mixed"});
    std::istringstream in("train,test,crash_pct,dt\nmerge/mixed,merge/mixed,5,100\n");
    const AdaptationMatrix m = assemble_matrix(two, two, read_synthetic_cells(in, two, two), 2.0 / 3, 1.0 / 3);
    CHECK(m.cell(0, 0).ok);
    CHECK_FALSE(m.cell(1, 1).ok);
    CHECK(std::isnan(m.error(1, 1)));
  }
  SUBCASE("bad header") {
    std::istringstream in("a,b,c\n");
    CHECK_THROWS(read_synthetic_cells(in, one, one));
  }
}

TEST_CASE("scaling a column's distances keeps its ordering") {
  const std::vector<Domain> d = parse_domains({"merge/aggressive", "merge/moderate", "merge/conservative"});
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> crash(0, 60), dist(50, 400);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<CellMetrics> cells;
    for (int i = 0; i < 9; ++i) cells.push_back({true, crash(rng), dist(rng), {}});
    std::vector<CellMetrics> scaled = cells;
    for (std::size_t r = 0; r < 3; ++r) scaled[r * 3 + 1].dt *= 3.7;
    const AdaptationMatrix a = assemble_matrix(d, d, cells, 2.0 / 3, 1.0 / 3);
    const AdaptationMatrix b = assemble_matrix(d, d, scaled, 2.0 / 3, 1.0 / 3);
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t q = 0; q < 3; ++q) {
        CHECK((a.error(r, 1) < a.error(q, 1)) == (b.error(r, 1) < b.error(q, 1)));
      }
      CHECK(b.error(r, 1) == doctest::Approx(a.error(r, 1)));
    }
  }
}

TEST_CASE("transfer schedule") {
  const auto s = transfer_schedule();
  REQUIRE(s.size() == 6);
  CHECK_FALSE(s[0].source.has_value());
  CHECK(*s[1].source == "drive");
  CHECK(*s[2].source == "T4");
  CHECK_FALSE(s[3].source.has_value());
  CHECK(*s[4].source == "drive");
  CHECK(*s[5].source == "T1");
  CHECK(s[0].task == sim::ScenarioKind::Merge);
  CHECK(s[3].task == sim::ScenarioKind::Exit);

  const ExperimentConfig c = small_config();  // zero episodes: final weights are the starting weights
  std::map<std::string, std::vector<float>> ck;
  CHECK_THROWS_AS(run_regimen(c, s[2], ck), std::runtime_error);

  run_regimen(c, s[0], ck);
  run_regimen(c, s[3], ck);
  // Scratch runs share the seed, so they start from the same weights.
  CHECK(ck.at("T1") == ck.at("T4"));

  std::vector<float> marked = ck.at("T4");
  for (std::size_t i = 0; i < marked.size(); i += 7) marked[i] = 0.25f;
  ck["T4"] = marked;
  run_regimen(c, s[2], ck);
  CHECK(ck.at("T3") == marked);
}

TEST_CASE("smoothing") {
  const std::vector<double> s = smooth({1, 2, 3, 4, 5}, 2);
  CHECK(s == std::vector<double>{1, 1.5, 2.5, 3.5, 4.5});
  CHECK(smooth({4, 8}, 10) == std::vector<double>{4, 6});
  CHECK(smooth({}, 3).empty());
  CHECK_THROWS_AS(smooth({1}, 0), std::invalid_argument);
}

TEST_CASE("sweep axes") {
  const BehaviorsConfig b;
  const driver::BehaviorParams lo = interpolate_axes(b.conservative, b.aggressive, 0, 0);
  const driver::BehaviorParams hi = interpolate_axes(b.conservative, b.aggressive, 1, 1);
  CHECK(lo.label == driver::BehaviorLabel::Conservative);
  CHECK(hi.label == driver::BehaviorLabel::Aggressive);
  CHECK(lo.politeness == b.conservative.politeness);
  CHECK(lo.time_gap == b.conservative.time_gap);
  CHECK(hi.politeness == b.aggressive.politeness);
  CHECK(hi.time_gap == b.aggressive.time_gap);
  const driver::BehaviorParams mixed = interpolate_axes(b.conservative, b.aggressive, 1, 0);
  CHECK(mixed.politeness == b.aggressive.politeness);
  CHECK(mixed.time_gap == b.conservative.time_gap);
  CHECK(mixed.label == driver::BehaviorLabel::Custom);

  CHECK(axis_points(3) == std::vector<std::pair<double, double>>{{0, 0}, {0.5, 0.5}, {1, 1}});
  CHECK(grid_points(2).size() == 4);
  CHECK_THROWS_AS(axis_points(1), std::invalid_argument);
}

TEST_CASE("sweep of a policy against itself has no gain") {
  ExperimentConfig c = small_config();
  c.harness.eval_episodes = 3;
  c.harness.phi_egoistic = c.reward.phi;
  const Policy p = Policy::random();
  const auto a = sensitivity_sweep(c, p, p, axis_points(2));
  const auto b = sensitivity_sweep(c, p, p, axis_points(2));
  REQUIRE(a.size() == 2);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].pg_safety == 0.0);
    CHECK(*a[i].pg_efficiency == 0.0);
    CHECK(a[i].social == b[i].social);
    CHECK(a[i].egoistic == b[i].egoistic);
  }
}

TEST_CASE("matrix CSV round trip and SVG") {
  LabeledMatrix m;
  m.corner = "train\\test";
  m.row_labels = {"merge/aggressive", "exit/mixed"};
  m.col_labels = {"merge/aggressive", "exit/mixed", "exit/moderate"};
  m.values = {0.1, 2.5, std::nan(""), 33.333333333333336, 0.0, 1e-9};
  std::istringstream in(matrix_csv(m));
  const LabeledMatrix back = parse_matrix_csv(in);
  CHECK(back.corner == m.corner);
  CHECK(back.row_labels == m.row_labels);
  CHECK(back.col_labels == m.col_labels);
  REQUIRE(back.values.size() == m.values.size());
  for (std::size_t i = 0; i < m.values.size(); ++i) {
    if (std::isnan(m.values[i])) CHECK(std::isnan(back.values[i]));
    else CHECK(back.values[i] == m.values[i]);
  }
  const std::string svg = heatmap_svg(m, "A");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("log") != std::string::npos);
  CHECK_THROWS_AS(heatmap_svg(LabeledMatrix{}, "empty"), std::invalid_argument);
}

TEST_CASE("empty results are rejected") {
  CHECK_THROWS_AS(episodes_csv({}), std::invalid_argument);
  CHECK_THROWS_AS(aggregate_csv({}), std::invalid_argument);
  CHECK_THROWS_AS(training_log_csv({}), std::invalid_argument);
  CHECK_THROWS_AS(sweep_csv({}), std::invalid_argument);
  CHECK_THROWS_AS(phi_csv({}), std::invalid_argument);
  CHECK_THROWS_AS(matrix_csv(LabeledMatrix{}), std::invalid_argument);
  CHECK_THROWS_AS(curves_svg({}, "t", "x", "y"), std::invalid_argument);
}

TEST_CASE("commands write resolved config and leave nothing on failure") {
  const fs::path root = scratch_dir("cmd");
  ExperimentConfig c = small_config();
  c.harness.policy = "idle";
  c.harness.eval_episodes = 2;
  const fs::path dir = run_command("eval", c, root);
  CHECK(fs::exists(dir / "resolved-config.json"));
  CHECK(fs::exists(dir / "episodes.csv"));
  CHECK(fs::exists(dir / "summary.csv"));
  std::ifstream in(dir / "resolved-config.json");
  const ExperimentConfig back = nlohmann::json::parse(in).get<ExperimentConfig>();
  CHECK(resolved_config_text(back) == resolved_config_text(c));

  c.harness.policy = "network";  // no checkpoint
  CHECK_THROWS(run_command("eval", c, root));
  c.harness.input = (root / "missing.csv").string();
  CHECK_THROWS(run_command("plot", c, root));
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(root)) ++entries;
  CHECK(entries == 1);
  CHECK_THROWS_AS(run_command("fly", c, root), std::invalid_argument);
  fs::remove_all(root);
}

TEST_CASE("synthetic adapt-matrix run emits csv and log-scale heatmap") {
  const fs::path root = scratch_dir("matrix");
  {
    std::ofstream f(root / "cells.csv");
    f << "train,test,crash_pct,dt\nmerge/mixed,merge/mixed,12,240\n";
  }
  ExperimentConfig c = small_config();
  c.harness.matrix_rows = {"merge/mixed"};
  c.harness.matrix_cols = {"merge/mixed"};
  c.harness.synthetic = (root / "cells.csv").string();
  const fs::path dir = run_command("adapt-matrix", c, root);
  std::ifstream in(dir / "a_error.csv");
  const LabeledMatrix m = parse_matrix_csv(in);
  REQUIRE(m.values.size() == 1);
  CHECK(m.values[0] == doctest::Approx(8.0));
  CHECK(fs::exists(dir / "a_error.svg"));
  fs::remove_all(root);
}

TEST_CASE("checkpoint save and load") {
  const fs::path root = scratch_dir("ckpt");
  learn::Mlp<float> net({6, 4, 5});
  std::mt19937_64 rng(5);
  net.init(rng);
  save_checkpoint(root / "n.bin", net, 42, small_config());
  CHECK(load_network(root / "n.bin").params() == net.params());
  CHECK_THROWS(load_network(root / "absent.bin"));
  fs::remove_all(root);
}

TEST_CASE("experiment config JSON") {
  ExperimentConfig c = small_config();
  c.seed = 99;
  c.behaviors.population = Population::Aggressive;
  c.harness.matrix_rows = {"exit/moderate"};
  const ExperimentConfig back = nlohmann::json(c).get<ExperimentConfig>();
  CHECK(resolved_config_text(back) == resolved_config_text(c));
  CHECK(back.seed == 99);

  nlohmann::json partial = {{"seed", 5}};
  const ExperimentConfig d = partial.get<ExperimentConfig>();
  CHECK(d.seed == 5);
  CHECK(d.harness.eval_episodes == ExperimentConfig{}.harness.eval_episodes);

  CHECK_THROWS(nlohmann::json({{"rewards", nlohmann::json::object()}}).get<ExperimentConfig>());
  CHECK_THROWS(population_from_string("calm"));
}
