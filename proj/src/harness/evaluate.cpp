#include "altruist/harness/evaluate.hpp"

#include <map>
#include <stdexcept>

#include "altruist/common/seeding.hpp"

namespace altruist::harness {

Policy Policy::network(learn::Mlp<float> net) {
  Policy p;
  p.kind = Kind::Network;
  p.net = std::make_shared<const learn::Mlp<float>>(std::move(net));
  return p;
}

std::string Policy::name() const {
  switch (kind) {
    case Kind::Network: return "network";
    case Kind::Random: return "random";
    case Kind::Constant: return std::string(sim::to_string(action));
  }
  return "random";
}

EvalSetup eval_setup(const ExperimentConfig& c, sim::ScenarioKind kind, Population population) {
  EvalSetup s;
  s.scenario = c.scenario;
  s.scenario.kind = kind;
  s.mix = c.behaviors.mix(population);
  s.reward = c.reward;
  s.safety = c.safety;
  s.grid = c.observation;
  return s;
}

EvalSetup eval_setup(const ExperimentConfig& c) { return eval_setup(c, c.scenario.kind, c.behaviors.population); }

EvalSetup eval_setup(const learn::TrainSetup& t) {
  EvalSetup s;
  s.scenario = t.scenario;
  s.mix = t.mix;
  s.reward = t.reward;
  s.safety = t.safety;
  s.grid = t.grid;
  return s;
}

std::vector<std::uint64_t> eval_seeds(std::uint64_t base, int n) {
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < n; ++i) seeds.push_back(derive_seed(base, kStreamEval, static_cast<std::uint64_t>(i)));
  return seeds;
}

EpisodeMetrics run_episode(const Policy& p, const EvalSetup& s, std::uint64_t seed, sim::EventLog* log) {
  if (p.kind == Policy::Kind::Network) {
    if (!p.net) throw std::invalid_argument("network policy without weights");
    if (p.net->sizes().front() != s.grid.input_size() || p.net->sizes().back() != sim::kActionCount) {
      throw std::invalid_argument("policy network does not match the observation/action sizes");
    }
  }
  sim::World w = sim::build_scenario(s.scenario, s.mix, seed);
  w.log.record_states = s.record_log || log != nullptr;
  w.log.record_masks = w.log.record_states;
  for (sim::Vehicle& v : w.vehicles) {
    if (v.is_av()) v.svo_phi = s.reward.phi;
  }
  std::mt19937_64 rng(derive_seed(seed, kStreamActions, 0));

  EpisodeMetrics m;
  m.seed = seed;
  const std::vector<int> avs = w.live_av_ids();
  std::map<int, obs::StackedState> stacks;
  std::map<int, double> returns;
  std::vector<float> out;

  while (!sim::is_terminal(w)) {
    sim::ActionMap actions;
    for (int id : w.live_av_ids()) {
      safety::ActionValues q{};
      safety::Mode mode = safety::Mode::Test;
      double eps = 0.0;
      switch (p.kind) {
        case Policy::Kind::Network: {
          const std::vector<float> state = learn::observe(w, id, stacks[id], s.grid);
          p.net->forward(state, 1, out);
          for (std::size_t a = 0; a < q.size(); ++a) q[a] = out[a];
          break;
        }
        case Policy::Kind::Random:
          mode = safety::Mode::Train;
          eps = 1.0;
          break;
        case Policy::Kind::Constant:
          q[static_cast<std::size_t>(sim::action_index(p.action))] = 1.0;
          break;
      }
      const safety::FilterResult fr = safety::filter_actions(w, id, q, s.safety, mode, eps, rng);
      safety::log_mask(w, id, fr);
      if (fr.intervened()) ++m.interventions;
      actions[id] = fr.chosen;
    }
    sim::advance(w, actions);
    for (const auto& [id, a] : actions) returns[id] += reward::agent_reward(w, id, s.reward);
  }

  m.steps = w.step_index;
  double dt = 0.0;
  double ret = 0.0;
  for (int id : avs) {
    dt += w.vehicle(id).distance_traveled;
    ret += returns[id];
  }
  if (!avs.empty()) {
    m.distance_traveled = dt / static_cast<double>(avs.size());
    m.reward_sum = ret / static_cast<double>(avs.size());
  }
  // Same notion of crash as episode termination: one involving an AV or the mission vehicle.
  for (const sim::Vehicle& v : w.vehicles) {
    if (v.crashed && (v.is_av() || v.id == w.mission_vehicle_id)) m.crashed = true;
  }
  if (const sim::Vehicle* mv = w.mission_vehicle()) {
    m.has_mission = true;
    m.mission_failed = mv->mission_status != sim::MissionStatus::Accomplished;
  }
  if (log) *log = w.log;
  return m;
}

std::vector<EpisodeMetrics> run_episodes_serial(const Policy& p, const EvalSetup& s,
                                                const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw std::invalid_argument("run_episodes needs at least one seed");
  std::vector<EpisodeMetrics> out;
  out.reserve(seeds.size());
  for (std::uint64_t seed : seeds) out.push_back(run_episode(p, s, seed));
  return out;
}

std::vector<EpisodeMetrics> run_episodes(const Policy& p, const EvalSetup& s, const std::vector<std::uint64_t>& seeds,
                                         int workers) {
  if (seeds.empty()) throw std::invalid_argument("run_episodes needs at least one seed");
  // Validate once up front so a mismatch throws here rather than inside the parallel region.
  if (p.kind == Policy::Kind::Network && (!p.net || p.net->sizes().front() != s.grid.input_size())) {
    throw std::invalid_argument("policy network does not match the observation/action sizes");
  }
  std::vector<EpisodeMetrics> out(seeds.size());
  std::vector<std::string> errors(seeds.size());
  const long n = static_cast<long>(seeds.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, workers))
  for (long i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = run_episode(p, s, seeds[static_cast<std::size_t>(i)]);
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) throw std::runtime_error("episode " + std::to_string(i) + ": " + errors[i]);
  }
  return out;
}

}  // namespace altruist::harness
