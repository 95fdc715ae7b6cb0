#include "altruist/learn/ddqn.hpp"

#include <stdexcept>

namespace altruist::learn {
namespace {

template <typename Real>
void check_batch(const Batch<Real>& b, int input) {
  const auto n = static_cast<std::size_t>(b.size);
  if (b.size <= 0) throw std::invalid_argument("empty batch");
  if (b.input != input || b.states.size() != n * input || b.next_states.size() != n * input ||
      b.actions.size() != n || b.rewards.size() != n || b.terminal.size() != n) {
    throw std::invalid_argument("batch shape does not match the network");
  }
}

}  // namespace

template <typename Real>
std::vector<Real> ddqn_targets(const Batch<Real>& batch, const Mlp<Real>& online, const Mlp<Real>& target, double gamma,
                               Backend be) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
  check_batch(batch, online.input_size());
  const int actions = online.output_size();
  std::vector<Real> q_online;
  std::vector<Real> q_target;
  online.forward(batch.next_states, batch.size, q_online, be);
  target.forward(batch.next_states, batch.size, q_target, be);
  std::vector<Real> y(static_cast<std::size_t>(batch.size));
  for (int i = 0; i < batch.size; ++i) {
    const auto row = static_cast<std::size_t>(i);
    if (batch.terminal[row]) {
      y[row] = batch.rewards[row];
      continue;
    }
    int best = 0;
    for (int a = 1; a < actions; ++a) {
      if (q_online[row * actions + a] > q_online[row * actions + best]) best = a;
    }
    y[row] = batch.rewards[row] + static_cast<Real>(gamma) * q_target[row * actions + best];
  }
  return y;
}

template <typename Real>
LossGrad<Real> loss_and_grad(const Mlp<Real>& online, const Batch<Real>& batch, const std::vector<Real>& targets,
                             Backend be) {
  check_batch(batch, online.input_size());
  if (targets.size() != static_cast<std::size_t>(batch.size)) throw std::invalid_argument("target count mismatch");
  const int actions = online.output_size();
  typename Mlp<Real>::Cache cache;
  std::vector<Real> q;
  online.forward(batch.states, batch.size, q, be, &cache);
  std::vector<Real> d_out(q.size(), Real(0));
  LossGrad<Real> r;
  const Real inv_n = Real(1) / static_cast<Real>(batch.size);
  for (int i = 0; i < batch.size; ++i) {
    const auto row = static_cast<std::size_t>(i);
    const int a = batch.actions[row];
    if (a < 0 || a >= actions) throw std::invalid_argument("batch action out of range");
    const Real err = q[row * actions + a] - targets[row];
    r.loss += err * err * inv_n;
    d_out[row * actions + a] = Real(2) * err * inv_n;
  }
  online.backward(cache, d_out, r.grad, be);
  return r;
}

template <typename Real>
LossGrad<Real> loss_and_grad(const Mlp<Real>& online, const Mlp<Real>& target, const Batch<Real>& batch, double gamma,
                             Backend be) {
  return loss_and_grad(online, batch, ddqn_targets(batch, online, target, gamma, be), be);
}

template struct Batch<float>;
template struct Batch<double>;
template std::vector<float> ddqn_targets(const Batch<float>&, const Mlp<float>&, const Mlp<float>&, double, Backend);
template std::vector<double> ddqn_targets(const Batch<double>&, const Mlp<double>&, const Mlp<double>&, double, Backend);
template LossGrad<float> loss_and_grad(const Mlp<float>&, const Batch<float>&, const std::vector<float>&, Backend);
template LossGrad<double> loss_and_grad(const Mlp<double>&, const Batch<double>&, const std::vector<double>&, Backend);
template LossGrad<float> loss_and_grad(const Mlp<float>&, const Mlp<float>&, const Batch<float>&, double, Backend);
template LossGrad<double> loss_and_grad(const Mlp<double>&, const Mlp<double>&, const Batch<double>&, double, Backend);

}  // namespace altruist::learn
