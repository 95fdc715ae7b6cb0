#include "altruist/harness/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace altruist::harness {

std::string_view to_string(Population p) {
  switch (p) {
    case Population::Aggressive: return "aggressive";
    case Population::Moderate: return "moderate";
    case Population::Conservative: return "conservative";
    case Population::Mixed: return "mixed";
  }
  return "mixed";
}

Population population_from_string(std::string_view name) {
  if (name == "aggressive" || name == "b_a") return Population::Aggressive;
  if (name == "moderate" || name == "b_m") return Population::Moderate;
  if (name == "conservative" || name == "b_c") return Population::Conservative;
  if (name == "mixed" || name == "b_mix") return Population::Mixed;
  throw std::invalid_argument("unknown behaviour population: " + std::string(name));
}

driver::BehaviorMix BehaviorsConfig::mix(Population p) const {
  switch (p) {
    case Population::Aggressive: return driver::BehaviorMix::point(aggressive);
    case Population::Moderate: return driver::BehaviorMix::point(moderate);
    case Population::Conservative: return driver::BehaviorMix::point(conservative);
    case Population::Mixed: break;
  }
  return driver::BehaviorMix({{aggressive, mix_weights[0]}, {moderate, mix_weights[1]}, {conservative, mix_weights[2]}});
}

void to_json(nlohmann::json& j, const BehaviorsConfig& c) {
  j = nlohmann::json{{"population", std::string(to_string(c.population))},
                     {"presets", {{"aggressive", c.aggressive}, {"moderate", c.moderate}, {"conservative", c.conservative}}},
                     {"mix", {{"aggressive", c.mix_weights[0]}, {"moderate", c.mix_weights[1]}, {"conservative", c.mix_weights[2]}}}};
}

void from_json(const nlohmann::json& j, BehaviorsConfig& c) {
  c = BehaviorsConfig{};
  if (j.contains("population")) c.population = population_from_string(j.at("population").get<std::string>());
  if (j.contains("presets")) {
    const auto& p = j.at("presets");
    // Each preset starts from its own defaults so partial overrides work.
    auto load = [&](const char* name, driver::BehaviorParams& out) {
      if (!p.contains(name)) return;
      nlohmann::json merged = p.at(name);
      if (!merged.contains("label")) merged["label"] = name;
      out = merged.get<driver::BehaviorParams>();
    };
    load("aggressive", c.aggressive);
    load("moderate", c.moderate);
    load("conservative", c.conservative);
  }
  if (j.contains("mix")) {
    const auto& m = j.at("mix");
    c.mix_weights = {m.value("aggressive", 1.0), m.value("moderate", 1.0), m.value("conservative", 1.0)};
  }
  (void)c.mix(Population::Mixed);  // validates the weights
}

void to_json(nlohmann::json& j, const HarnessConfig& c) {
  j = nlohmann::json{{"eval_episodes", c.eval_episodes},
                     {"workers", c.workers},
                     {"w_s", c.w_s},
                     {"w_e", c.w_e},
                     {"phi_egoistic", c.phi_egoistic},
                     {"phi_candidates", c.phi_candidates},
                     {"smoothing_window", c.smoothing_window},
                     {"svg", c.svg},
                     {"policy", c.policy},
                     {"checkpoint", c.checkpoint},
                     {"sweep", c.sweep},
                     {"sweep_points", c.sweep_points},
                     {"egoistic_checkpoint", c.egoistic_checkpoint},
                     {"matrix_rows", c.matrix_rows},
                     {"matrix_cols", c.matrix_cols},
                     {"synthetic", c.synthetic},
                     {"checkpoint_dir", c.checkpoint_dir},
                     {"calibration", c.calibration},
                     {"calibration_seeds", c.calibration_seeds},
                     {"log", c.log},
                     {"vehicle", c.vehicle},
                     {"grid_points", c.grid_points},
                     {"input", c.input}};
  j["classifier"] = c.classifier ? nlohmann::json(*c.classifier) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, HarnessConfig& c) {
  const HarnessConfig d;
  c.eval_episodes = j.value("eval_episodes", d.eval_episodes);
  c.workers = j.value("workers", d.workers);
  c.w_s = j.value("w_s", d.w_s);
  c.w_e = j.value("w_e", d.w_e);
  c.phi_egoistic = j.value("phi_egoistic", d.phi_egoistic);
  c.phi_candidates = j.value("phi_candidates", d.phi_candidates);
  c.smoothing_window = j.value("smoothing_window", d.smoothing_window);
  c.svg = j.value("svg", d.svg);
  c.policy = j.value("policy", d.policy);
  c.checkpoint = j.value("checkpoint", d.checkpoint);
  c.sweep = j.value("sweep", d.sweep);
  c.sweep_points = j.value("sweep_points", d.sweep_points);
  c.egoistic_checkpoint = j.value("egoistic_checkpoint", d.egoistic_checkpoint);
  c.matrix_rows = j.value("matrix_rows", d.matrix_rows);
  c.matrix_cols = j.value("matrix_cols", d.matrix_cols);
  c.synthetic = j.value("synthetic", d.synthetic);
  c.checkpoint_dir = j.value("checkpoint_dir", d.checkpoint_dir);
  c.calibration = j.contains("calibration") ? j.at("calibration").get<analysis::CalibrationConfig>() : d.calibration;
  c.calibration_seeds = j.value("calibration_seeds", d.calibration_seeds);
  c.classifier.reset();
  if (j.contains("classifier") && !j.at("classifier").is_null()) {
    c.classifier = j.at("classifier").get<analysis::ClassifierConfig>();
  }
  c.log = j.value("log", d.log);
  c.vehicle = j.value("vehicle", d.vehicle);
  c.grid_points = j.value("grid_points", d.grid_points);
  c.input = j.value("input", d.input);

  if (c.eval_episodes < 1) throw std::invalid_argument("harness: eval_episodes must be >= 1");
  if (c.workers < 1) throw std::invalid_argument("harness: workers must be >= 1");
  if (c.smoothing_window < 1) throw std::invalid_argument("harness: smoothing_window must be >= 1");
  if (c.sweep_points < 2 || c.grid_points < 1) throw std::invalid_argument("harness: too few sweep points");
  if (c.calibration_seeds < 1) throw std::invalid_argument("harness: calibration_seeds must be >= 1");
  if (c.policy != "network" && c.policy != "random" && c.policy != "idle") {
    throw std::invalid_argument("harness: unknown policy " + c.policy);
  }
  if (c.sweep != "axis" && c.sweep != "grid" && c.sweep != "phi") {
    throw std::invalid_argument("harness: unknown sweep " + c.sweep);
  }
}

learn::TrainSetup ExperimentConfig::train_setup(sim::ScenarioKind kind, Population population, double phi) const {
  learn::TrainSetup s;
  s.scenario = scenario;
  s.scenario.kind = kind;
  s.mix = behaviors.mix(population);
  s.reward = reward;
  s.reward.phi = phi;
  s.safety = safety;
  s.grid = observation;
  s.learner = learner;
  s.seed = seed;
  return s;
}

learn::TrainSetup ExperimentConfig::train_setup() const {
  return train_setup(scenario.kind, behaviors.population, reward.phi);
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = nlohmann::json{{"seed", c.seed},
                     {"scenario", c.scenario},
                     {"behaviors", c.behaviors},
                     {"reward", c.reward},
                     {"safety", c.safety},
                     {"learner", c.learner},
                     {"harness", c.harness}};
  j["learner"]["observation"] = c.observation;
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  static const std::set<std::string> known{"seed", "scenario", "behaviors", "reward", "safety", "learner", "harness"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw std::invalid_argument("unknown config section: " + key);
  }
  const nlohmann::json empty = nlohmann::json::object();
  auto section = [&](const char* name) -> const nlohmann::json& { return j.contains(name) ? j.at(name) : empty; };
  c = ExperimentConfig{};
  c.seed = j.value("seed", c.seed);
  c.scenario = section("scenario").get<sim::ScenarioConfig>();
  c.behaviors = section("behaviors").get<BehaviorsConfig>();
  c.reward = section("reward").get<reward::RewardConfig>();
  c.safety = section("safety").get<safety::SafetyConfig>();
  c.learner = section("learner").get<learn::LearnerConfig>();
  const nlohmann::json& learner = section("learner");
  c.observation = learner.contains("observation") ? learner.at("observation").get<obs::GridSpec>() : obs::GridSpec{};
  c.harness = section("harness").get<HarnessConfig>();
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("config " + path.string() + ": " + e.what());
  }
  return j.get<ExperimentConfig>();
}

}  // namespace altruist::harness
