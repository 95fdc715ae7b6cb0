#include "altruist/learn/q_function.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace altruist::learn {

bool Adam::step(std::vector<float>& params, const std::vector<float>& grad) {
  if (grad.size() != params.size() || m_.size() != params.size()) {
    throw std::invalid_argument("adam: gradient shape does not match the parameters");
  }
  for (float g : grad) {
    if (!std::isfinite(g)) return false;
  }
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  const auto b1 = static_cast<float>(cfg_.beta1);
  const auto b2 = static_cast<float>(cfg_.beta2);
  const auto step = static_cast<float>(cfg_.lr / c1);
  const auto inv_c2 = static_cast<float>(1.0 / c2);
  const auto eps = static_cast<float>(cfg_.eps);
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = b1 * m_[i] + (1.0f - b1) * grad[i];
    v_[i] = b2 * v_[i] + (1.0f - b2) * grad[i] * grad[i];
    params[i] -= step * m_[i] / (std::sqrt(v_[i] * inv_c2) + eps);
  }
  return true;
}

QFunction::QFunction(std::vector<int> sizes, AdamConfig adam, int target_update, std::mt19937_64& rng)
    : online(std::move(sizes)), adam_(adam, 0), target_update_(target_update) {
  if (online.output_size() != 5) throw std::invalid_argument("q-function must have 5 outputs");
  if (target_update < 1) throw std::invalid_argument("target_update must be >= 1");
  online.init(rng);
  target = online;
  adam_ = Adam(adam, online.param_count());
}

std::array<double, 5> QFunction::q_values(const std::vector<float>& state, Backend be) const {
  std::vector<float> out;
  online.forward(state, 1, out, be);
  std::array<double, 5> q{};
  for (std::size_t a = 0; a < q.size(); ++a) q[a] = out[a];
  return q;
}

QFunction::StepResult QFunction::train_step(const Batch<float>& batch, double gamma, Backend be) {
  StepResult r;
  const LossGrad<float> lg = loss_and_grad(online, target, batch, gamma, be);
  r.loss = lg.loss;
  if (!std::isfinite(lg.loss) || !adam_.step(online.params(), lg.grad)) {
    ++rejected_;
    return r;
  }
  r.applied = true;
  ++steps_;
  if (steps_ % target_update_ == 0) {
    sync_target();
    r.synced = true;
  }
  return r;
}

double epsilon(double step, const EpsilonSchedule& s) {
  if (step <= 0.0) return s.start;
  if (s.horizon <= 0.0 || step >= s.horizon) return s.end;
  return s.start + (s.end - s.start) * (step / s.horizon);
}

namespace {

constexpr char kMagic[8] = {'A', 'L', 'T', 'Q', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T value) {
  auto bits = std::bit_cast<std::array<char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  out.write(bits.data(), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  std::array<char, sizeof(T)> bits{};
  if (!in.read(bits.data(), sizeof(T))) throw std::runtime_error("checkpoint truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& c) {
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(c.sizes.size()));
  for (int s : c.sizes) put<std::int32_t>(out, s);
  put<std::int64_t>(out, c.steps);
  put<std::uint64_t>(out, c.config_hash);
  put<std::uint64_t>(out, c.params.size());
  for (float f : c.params) put<float>(out, f);
  if (!out) throw std::runtime_error("checkpoint write failed");
}

Checkpoint read_checkpoint(std::istream& in) {
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || !std::equal(magic, magic + sizeof magic, kMagic)) {
    throw std::runtime_error("not a checkpoint file");
  }
  if (get<std::uint32_t>(in) != kVersion) throw std::runtime_error("unsupported checkpoint version");
  Checkpoint c;
  const auto n_sizes = get<std::uint32_t>(in);
  if (n_sizes < 2 || n_sizes > 64) throw std::runtime_error("checkpoint topology is malformed");
  for (std::uint32_t i = 0; i < n_sizes; ++i) c.sizes.push_back(get<std::int32_t>(in));
  c.steps = get<std::int64_t>(in);
  c.config_hash = get<std::uint64_t>(in);
  const auto n = get<std::uint64_t>(in);
  std::uint64_t expected = 0;
  for (std::size_t l = 0; l + 1 < c.sizes.size(); ++l) {
    expected += static_cast<std::uint64_t>(c.sizes[l]) * c.sizes[l + 1] + c.sizes[l + 1];
  }
  if (n != expected) throw std::runtime_error("checkpoint parameter count does not match its topology");
  c.params.resize(n);
  for (auto& f : c.params) f = get<float>(in);
  return c;
}

std::uint64_t config_hash(const nlohmann::json& j) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace altruist::learn
