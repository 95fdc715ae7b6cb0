#pragma once

#include <cstdint>
#include <vector>

#include "altruist/learn/mlp.hpp"

namespace altruist::learn {

/// Mini-batch in flat row-major form. Rows of `next_states` are ignored for
/// terminal samples (unsafe samples are always terminal).
template <typename Real>
struct Batch {
  int size = 0;
  int input = 0;
  std::vector<Real> states;
  std::vector<Real> next_states;
  std::vector<int> actions;
  std::vector<Real> rewards;
  std::vector<std::uint8_t> terminal;
};

/// Double-DQN targets: reward for terminal rows, otherwise
/// reward + gamma * Q_target(s', argmax_a Q_online(s', a)).
template <typename Real>
std::vector<Real> ddqn_targets(const Batch<Real>& batch, const Mlp<Real>& online, const Mlp<Real>& target, double gamma,
                               Backend be = Backend::Serial);

template <typename Real>
struct LossGrad {
  Real loss = 0;
  std::vector<Real> grad;
};

/// Mean squared error between the targets and Q(s, a; online), with the
/// gradient w.r.t. the online parameters (targets held constant).
template <typename Real>
LossGrad<Real> loss_and_grad(const Mlp<Real>& online, const Batch<Real>& batch, const std::vector<Real>& targets,
                             Backend be = Backend::Serial);

template <typename Real>
LossGrad<Real> loss_and_grad(const Mlp<Real>& online, const Mlp<Real>& target, const Batch<Real>& batch, double gamma,
                             Backend be = Backend::Serial);

extern template struct Batch<float>;
extern template struct Batch<double>;

}  // namespace altruist::learn
