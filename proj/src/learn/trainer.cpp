#include "altruist/learn/trainer.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "altruist/common/seeding.hpp"

namespace altruist::learn {

void LearnerConfig::validate() const {
  if (hidden.empty()) throw std::invalid_argument("learner: at least one hidden layer");
  for (int h : hidden) {
    if (h <= 0) throw std::invalid_argument("learner: hidden sizes must be positive");
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("learner: gamma outside [0, 1]");
  if (batch < 1 || buffer < batch) throw std::invalid_argument("learner: need 1 <= batch <= buffer");
  if (target_update < 1 || n_iterations < 1) throw std::invalid_argument("learner: update periods must be >= 1");
  if (pre_store < 0 || episodes < 0) throw std::invalid_argument("learner: negative episode counts");
  if (!(eps_fraction > 0.0 && eps_fraction <= 1.0)) throw std::invalid_argument("learner: eps_fraction in (0, 1]");
  if (!(adam.lr > 0.0)) throw std::invalid_argument("learner: learning rate must be positive");
}

void to_json(nlohmann::json& j, const LearnerConfig& c) {
  j = nlohmann::json{{"hidden", c.hidden},
                     {"lr", c.adam.lr},
                     {"beta1", c.adam.beta1},
                     {"beta2", c.adam.beta2},
                     {"adam_eps", c.adam.eps},
                     {"gamma", c.gamma},
                     {"batch", c.batch},
                     {"buffer", c.buffer},
                     {"target_update", c.target_update},
                     {"n_iterations", c.n_iterations},
                     {"pre_store", c.pre_store},
                     {"episodes", c.episodes},
                     {"eps_start", c.eps_start},
                     {"eps_end", c.eps_end},
                     {"eps_fraction", c.eps_fraction},
                     {"replay_shares", c.replay_shares},
                     {"store_all_agents", c.store_all_agents},
                     {"backend", c.backend == Backend::OpenMP ? "openmp" : "serial"}};
}

void from_json(const nlohmann::json& j, LearnerConfig& c) {
  LearnerConfig d;
  c.hidden = j.value("hidden", d.hidden);
  c.adam.lr = j.value("lr", d.adam.lr);
  c.adam.beta1 = j.value("beta1", d.adam.beta1);
  c.adam.beta2 = j.value("beta2", d.adam.beta2);
  c.adam.eps = j.value("adam_eps", d.adam.eps);
  c.gamma = j.value("gamma", d.gamma);
  c.batch = j.value("batch", d.batch);
  c.buffer = j.value("buffer", d.buffer);
  c.target_update = j.value("target_update", d.target_update);
  c.n_iterations = j.value("n_iterations", d.n_iterations);
  c.pre_store = j.value("pre_store", d.pre_store);
  c.episodes = j.value("episodes", d.episodes);
  c.eps_start = j.value("eps_start", d.eps_start);
  c.eps_end = j.value("eps_end", d.eps_end);
  c.eps_fraction = j.value("eps_fraction", d.eps_fraction);
  c.replay_shares = j.value("replay_shares", d.replay_shares);
  c.store_all_agents = j.value("store_all_agents", d.store_all_agents);
  const std::string backend = j.value("backend", std::string("openmp"));
  if (backend != "openmp" && backend != "serial") throw std::invalid_argument("learner: unknown backend " + backend);
  c.backend = backend == "openmp" ? Backend::OpenMP : Backend::Serial;
  c.validate();
}

std::vector<int> topology(const obs::GridSpec& g, const LearnerConfig& c) {
  std::vector<int> sizes{g.input_size()};
  sizes.insert(sizes.end(), c.hidden.begin(), c.hidden.end());
  sizes.push_back(sim::kActionCount);
  return sizes;
}

double episode_epsilon(int episode, const LearnerConfig& c) {
  if (episode < c.pre_store) return 1.0;
  const double horizon = c.eps_fraction * std::max(1, c.episodes - c.pre_store);
  return epsilon(episode - c.pre_store, EpsilonSchedule{c.eps_start, c.eps_end, horizon});
}

std::vector<float> observe(const sim::World& w, int ego, obs::StackedState& stack, const obs::GridSpec& g) {
  stack = obs::stack_history(stack, obs::render_velocity_map(w, ego, g), g.history);
  return obs::flatten(stack, g);
}

namespace {

safety::ActionValues action_values(const Mlp<float>& net, const std::vector<float>& state, Backend be) {
  std::vector<float> out;
  net.forward(state, 1, out, be);
  safety::ActionValues q{};
  for (std::size_t a = 0; a < q.size(); ++a) q[a] = out[a];
  return q;
}

bool mission_event(const std::vector<sim::Event>& events) {
  for (const sim::Event& e : events) {
    if (e.type == sim::EventType::MissionAccomplished || e.type == sim::EventType::MissionFailed) return true;
  }
  return false;
}

}  // namespace

TrainResult train_marl(const TrainSetup& s, const std::optional<std::vector<float>>& initial,
                       const std::function<void(const EpisodeLog&)>& on_episode) {
  const LearnerConfig& lc = s.learner;
  lc.validate();
  s.grid.validate();
  s.safety.validate();
  s.reward.validate();

  std::mt19937_64 init_rng(derive_seed(s.seed, kStreamInit, 0));
  TrainResult result;
  QFunction& q = result.q;
  q = QFunction(topology(s.grid, lc), lc.adam, lc.target_update, init_rng);
  if (initial) {
    if (initial->size() != q.online.param_count()) throw std::invalid_argument("warm-start weights do not fit the topology");
    q.online.params() = *initial;
    q.sync_target();
  }
  Mlp<float> frozen = q.online;  // w- held by every agent except the learning one

  ReplayBuffer buffer(static_cast<std::size_t>(lc.buffer), lc.replay_shares);
  std::mt19937_64 replay_rng(derive_seed(s.seed, kStreamReplay, 0));
  const int input = s.grid.input_size();
  const auto r_unsafe = static_cast<float>(s.reward.r_unsafe);

  long ticks = 0;
  int learning_slot = 0;

  for (int ep = 0; ep < lc.episodes; ++ep) {
    sim::World w = sim::build_scenario(s.scenario, s.mix, derive_seed(s.seed, kStreamScenario, static_cast<std::uint64_t>(ep)));
    for (sim::Vehicle& v : w.vehicles) {
      if (v.is_av()) v.svo_phi = s.reward.phi;
    }
    std::mt19937_64 act_rng(derive_seed(s.seed, kStreamActions, static_cast<std::uint64_t>(ep)));
    const double eps = episode_epsilon(ep, lc);
    const bool learning = ep >= lc.pre_store;

    EpisodeLog log;
    log.episode = ep;
    log.epsilon = eps;
    double loss_sum = 0.0;

    std::map<int, obs::StackedState> stacks;
    std::map<int, std::vector<float>> states;
    std::map<int, double> returns;
    const std::vector<int> avs = w.live_av_ids();
    for (int id : avs) {
      states[id] = observe(w, id, stacks[id], s.grid);
      returns[id] = 0.0;
    }

    while (!sim::is_terminal(w)) {
      const std::vector<int> live = w.live_av_ids();
      const int learner_id = avs[static_cast<std::size_t>(learning_slot) % avs.size()];
      sim::ActionMap actions;
      for (int id : live) {
        const Mlp<float>& net = id == learner_id ? q.online : frozen;
        const safety::ActionValues values =
            eps >= 1.0 ? safety::ActionValues{} : action_values(net, states[id], lc.backend);
        const safety::FilterResult fr =
            safety::filter_actions(w, id, values, s.safety, safety::Mode::Train, eps, act_rng);
        safety::log_mask(w, id, fr);
        actions[id] = fr.chosen;
        if (fr.intervened()) ++log.interventions;
        if (lc.store_all_agents || id == learner_id) {
          for (const auto& [a, score] : fr.rejected) {
            buffer.add(unsafe_experience(states[id], sim::action_index(a), r_unsafe));
          }
        }
      }

      const std::vector<sim::Event> events = sim::advance(w, actions);
      const bool terminal = sim::is_terminal(w);
      const bool mission_tick = mission_event(events);

      for (int id : live) {
        const sim::Vehicle& v = w.vehicle(id);
        const double r = reward::agent_reward(w, id, s.reward);
        returns[id] += r;
        const bool done = terminal || !v.alive();
        std::vector<float> next;
        if (!done) next = observe(w, id, stacks[id], s.grid);
        if (lc.store_all_agents || id == learner_id) {
          Experience e;
          e.state = states[id];
          e.action = sim::action_index(actions[id]);
          e.reward = static_cast<float>(r);
          e.terminal = done;
          e.next_state = next;
          const bool mission_reward = w.mission_vehicle() != nullptr &&
                                      reward::mission_reward(w, id, w.mission_vehicle_id, s.reward) != 0.0;
          e.stratum = v.crashed_in_tick ? Stratum::Crash
                      : (mission_tick || mission_reward) ? Stratum::Mission
                                                         : Stratum::Ordinary;
          buffer.add(std::move(e));
        }
        states[id] = std::move(next);
      }

      if (learning && buffer.size() >= static_cast<std::size_t>(lc.batch)) {
        const Batch<float> batch = ReplayBuffer::to_batch(buffer.sample(lc.batch, replay_rng), input);
        const QFunction::StepResult sr = q.train_step(batch, lc.gamma, lc.backend);
        if (!std::isfinite(sr.loss)) {
          throw std::runtime_error("non-finite loss at episode " + std::to_string(ep) + ", step " +
                                   std::to_string(q.steps()));
        }
        loss_sum += sr.loss;
        ++log.gradient_steps;
      }

      ++ticks;
      if (ticks % lc.n_iterations == 0) {
        frozen = q.online;  // broadcast w+ to every agent
        learning_slot = (learning_slot + 1) % static_cast<int>(avs.size());
      }
    }

    double total = 0.0;
    for (int id : avs) total += returns[id];
    log.ret = total / static_cast<double>(avs.size());
    for (const sim::Vehicle& v : w.vehicles) {
      if (v.crashed && (v.is_av() || v.id == w.mission_vehicle_id)) log.crashes = 1;
    }
    if (const sim::Vehicle* m = w.mission_vehicle()) log.mission = m->mission_status == sim::MissionStatus::Accomplished;
    log.loss = log.gradient_steps > 0 ? loss_sum / log.gradient_steps : std::numeric_limits<double>::quiet_NaN();
    result.log.push_back(log);
    if (on_episode) on_episode(log);
  }
  return result;
}

}  // namespace altruist::learn
