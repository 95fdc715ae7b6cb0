#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <random>
#include <vector>

#include "altruist/learn/ddqn.hpp"

namespace altruist::learn {

enum class Stratum : int { Crash = 0, Mission = 1, Ordinary = 2 };
inline constexpr int kStrata = 3;

struct Experience {
  std::vector<float> state;
  int action = 0;
  float reward = 0.0f;
  std::vector<float> next_state;  // empty when terminal
  bool terminal = false;
  bool unsafe = false;
  Stratum stratum = Stratum::Ordinary;
};

/// Builds an unsafe experience: terminal, with reward r_unsafe, in the crash stratum.
Experience unsafe_experience(std::vector<float> state, int action, float r_unsafe);

/// Capacity-bounded buffer split into three FIFO strata. When full, the
/// stratum that most exceeds its target share loses its oldest entry (ties go
/// to the ordinary stratum first), so unsafe and mission experiences are
/// only evicted once they outgrow their share.
class ReplayBuffer {
 public:
  ReplayBuffer() = default;
  ReplayBuffer(std::size_t capacity, std::array<double, kStrata> shares = {0.25, 0.25, 0.5});

  void add(Experience e);
  std::size_t size() const;
  std::size_t size(Stratum s) const { return strata_[static_cast<std::size_t>(s)].size(); }
  std::size_t capacity() const { return capacity_; }
  const std::deque<Experience>& stratum(Stratum s) const { return strata_[static_cast<std::size_t>(s)]; }

  /// Per-stratum sample counts for a batch: target shares of `batch`, with
  /// any shortfall moved to the strata that still have entries.
  std::array<int, kStrata> composition(int batch) const;

  /// Stratified sample without replacement. Throws std::logic_error when the
  /// buffer holds fewer than `batch` experiences.
  std::vector<const Experience*> sample(int batch, std::mt19937_64& rng) const;

  /// Flat batch ready for the DDQN loss.
  static Batch<float> to_batch(const std::vector<const Experience*>& items, int input);

 private:
  std::size_t capacity_ = 0;
  std::array<double, kStrata> shares_{};
  std::array<std::deque<Experience>, kStrata> strata_;
};

}  // namespace altruist::learn
