#include "altruist/learn/replay.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace altruist::learn {

Experience unsafe_experience(std::vector<float> state, int action, float r_unsafe) {
  Experience e;
  e.state = std::move(state);
  e.action = action;
  e.reward = r_unsafe;
  e.terminal = true;
  e.unsafe = true;
  e.stratum = Stratum::Crash;
  return e;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::array<double, kStrata> shares)
    : capacity_(capacity), shares_(shares) {
  if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
  double total = 0.0;
  for (double s : shares_) {
    if (!(s > 0.0)) throw std::invalid_argument("replay shares must be positive");
    total += s;
  }
  for (double& s : shares_) s /= total;
}

std::size_t ReplayBuffer::size() const {
  std::size_t n = 0;
  for (const auto& s : strata_) n += s.size();
  return n;
}

void ReplayBuffer::add(Experience e) {
  if (e.unsafe && (!e.terminal || !e.next_state.empty())) {
    throw std::invalid_argument("unsafe experiences must be terminal");
  }
  if (size() >= capacity_) {
    int victim = -1;
    double worst = -1.0;
    for (int s : {2, 1, 0}) {
      const auto& q = strata_[static_cast<std::size_t>(s)];
      if (q.empty()) continue;
      const double excess = static_cast<double>(q.size()) / shares_[static_cast<std::size_t>(s)];
      if (excess > worst) {
        worst = excess;
        victim = s;
      }
    }
    strata_[static_cast<std::size_t>(victim)].pop_front();
  }
  strata_[static_cast<std::size_t>(e.stratum)].push_back(std::move(e));
}

std::array<int, kStrata> ReplayBuffer::composition(int batch) const {
  std::array<int, kStrata> take{};
  std::array<int, kStrata> avail{};
  for (int s = 0; s < kStrata; ++s) avail[s] = static_cast<int>(strata_[static_cast<std::size_t>(s)].size());
  // Largest-remainder rounding of the target shares.
  std::array<double, kStrata> exact{};
  int assigned = 0;
  for (int s = 0; s < kStrata; ++s) {
    exact[s] = shares_[s] * batch;
    take[s] = static_cast<int>(std::floor(exact[s]));
    assigned += take[s];
  }
  std::array<int, kStrata> order{2, 1, 0};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return exact[a] - take[a] > exact[b] - take[b]; });
  for (int i = 0; assigned < batch; ++i, ++assigned) ++take[order[static_cast<std::size_t>(i % kStrata)]];

  int shortfall = 0;
  for (int s = 0; s < kStrata; ++s) {
    if (take[s] > avail[s]) {
      shortfall += take[s] - avail[s];
      take[s] = avail[s];
    }
  }
  // Hand the shortfall to strata with spare entries, proportionally to their shares.
  while (shortfall > 0) {
    double weight = 0.0;
    for (int s = 0; s < kStrata; ++s) {
      if (avail[s] > take[s]) weight += shares_[s];
    }
    if (weight == 0.0) break;
    int given = 0;
    const int pool = shortfall;
    for (int s : {2, 1, 0}) {
      const int spare = avail[s] - take[s];
      if (spare <= 0 || given >= pool) continue;
      const int want = std::max(1, static_cast<int>(std::floor(pool * shares_[s] / weight)));
      const int add = std::min({want, spare, pool - given});
      take[s] += add;
      given += add;
    }
    shortfall -= given;
  }
  return take;
}

std::vector<const Experience*> ReplayBuffer::sample(int batch, std::mt19937_64& rng) const {
  if (batch <= 0) throw std::invalid_argument("batch size must be positive");
  if (size() < static_cast<std::size_t>(batch)) {
    throw std::logic_error("replay buffer underfull: " + std::to_string(size()) + " < " + std::to_string(batch));
  }
  const auto take = composition(batch);
  std::vector<const Experience*> out;
  out.reserve(static_cast<std::size_t>(batch));
  for (int s = 0; s < kStrata; ++s) {
    const auto& q = strata_[static_cast<std::size_t>(s)];
    std::vector<std::size_t> idx(q.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    // Partial Fisher-Yates: the first take[s] slots become the sample.
    for (int i = 0; i < take[s]; ++i) {
      std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i), idx.size() - 1);
      std::swap(idx[static_cast<std::size_t>(i)], idx[pick(rng)]);
      out.push_back(&q[idx[static_cast<std::size_t>(i)]]);
    }
  }
  return out;
}

Batch<float> ReplayBuffer::to_batch(const std::vector<const Experience*>& items, int input) {
  Batch<float> b;
  b.size = static_cast<int>(items.size());
  b.input = input;
  b.states.reserve(items.size() * static_cast<std::size_t>(input));
  b.next_states.reserve(items.size() * static_cast<std::size_t>(input));
  for (const Experience* e : items) {
    if (e->state.size() != static_cast<std::size_t>(input)) throw std::invalid_argument("experience state size mismatch");
    b.states.insert(b.states.end(), e->state.begin(), e->state.end());
    if (e->terminal) {
      b.next_states.insert(b.next_states.end(), static_cast<std::size_t>(input), 0.0f);
    } else {
      if (e->next_state.size() != static_cast<std::size_t>(input)) {
        throw std::invalid_argument("experience next-state size mismatch");
      }
      b.next_states.insert(b.next_states.end(), e->next_state.begin(), e->next_state.end());
    }
    b.actions.push_back(e->action);
    b.rewards.push_back(e->reward);
    b.terminal.push_back(e->terminal ? 1 : 0);
  }
  return b;
}

}  // namespace altruist::learn
