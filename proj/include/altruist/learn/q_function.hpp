#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include <json.hpp>

#include "altruist/learn/ddqn.hpp"
#include "altruist/learn/mlp.hpp"

namespace altruist::learn {

struct AdamConfig {
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  Adam() = default;
  Adam(AdamConfig cfg, std::size_t n) : cfg_(cfg), m_(n, 0.0f), v_(n, 0.0f) {}

  /// Applies one update; returns false (leaving everything untouched) when
  /// the gradient has a non-finite entry.
  bool step(std::vector<float>& params, const std::vector<float>& grad);
  long steps() const { return t_; }

 private:
  AdamConfig cfg_;
  std::vector<float> m_;
  std::vector<float> v_;
  long t_ = 0;
};

/// Online and target networks plus optimizer state.
class QFunction {
 public:
  QFunction() = default;
  QFunction(std::vector<int> sizes, AdamConfig adam, int target_update, std::mt19937_64& rng);

  std::array<double, 5> q_values(const std::vector<float>& state, Backend be = Backend::Serial) const;

  struct StepResult {
    double loss = 0.0;
    bool applied = false;
    bool synced = false;
  };
  /// One DDQN gradient step. A non-finite gradient is rejected and counted.
  StepResult train_step(const Batch<float>& batch, double gamma, Backend be = Backend::Serial);

  void sync_target() { target = online; }
  long steps() const { return steps_; }
  long rejected_steps() const { return rejected_; }
  int target_update() const { return target_update_; }

  Mlp<float> online;
  Mlp<float> target;

 private:
  Adam adam_;
  int target_update_ = 300;
  long steps_ = 0;
  long rejected_ = 0;
};

struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.05;
  double horizon = 1.0;  // steps until `end` is reached
};

/// Linear decay from start to end over the horizon, constant afterwards.
double epsilon(double step, const EpsilonSchedule& s);

/// Binary checkpoint: magic, version, topology, step count, config hash,
/// then each layer's weights and biases as little-endian float32.
struct Checkpoint {
  std::vector<int> sizes;
  std::int64_t steps = 0;
  std::uint64_t config_hash = 0;
  std::vector<float> params;
};

void write_checkpoint(std::ostream& out, const Checkpoint& c);
/// Throws std::runtime_error on a malformed or truncated file.
Checkpoint read_checkpoint(std::istream& in);

/// FNV-1a over a canonical JSON dump.
std::uint64_t config_hash(const nlohmann::json& j);

}  // namespace altruist::learn
