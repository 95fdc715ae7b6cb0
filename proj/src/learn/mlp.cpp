#include "altruist/learn/mlp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace altruist::learn {
namespace {

template <typename Real>
void forward_layer(Backend be, const Real* x, int batch, int in, const Real* w, const Real* b, int out, Real* y) {
  if (be == Backend::OpenMP) omp::dense_forward(x, batch, in, w, b, out, y);
  else serial::dense_forward(x, batch, in, w, b, out, y);
}

}  // namespace

template <typename Real>
Mlp<Real>::Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw std::invalid_argument("mlp needs at least an input and an output size");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    if (sizes_[l] <= 0 || sizes_[l + 1] <= 0) throw std::invalid_argument("mlp layer sizes must be positive");
    offsets_.push_back(total);
    total += static_cast<std::size_t>(sizes_[l]) * sizes_[l + 1] + sizes_[l + 1];
  }
  params_.assign(total, Real(0));
}

template <typename Real>
std::size_t Mlp<Real>::bias_offset(int layer) const {
  const auto l = static_cast<std::size_t>(layer);
  return offsets_[l] + static_cast<std::size_t>(sizes_[l]) * sizes_[l + 1];
}

template <typename Real>
void Mlp<Real>::init(std::mt19937_64& rng) {
  for (int l = 0; l < layers(); ++l) {
    const int in = sizes_[static_cast<std::size_t>(l)];
    const int out = sizes_[static_cast<std::size_t>(l) + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> u(-bound, bound);
    const std::size_t begin = weight_offset(l);
    const std::size_t end = begin + static_cast<std::size_t>(in) * out + out;
    for (std::size_t i = begin; i < end; ++i) params_[i] = static_cast<Real>(u(rng));
  }
}

template <typename Real>
void Mlp<Real>::forward(const std::vector<Real>& x, int batch, std::vector<Real>& out, Backend be,
                        Cache* cache) const {
  if (batch <= 0 || x.size() != static_cast<std::size_t>(batch) * input_size()) {
    throw std::invalid_argument("mlp forward: expected " + std::to_string(batch) + " x " +
                                std::to_string(input_size()) + " inputs, got " + std::to_string(x.size()));
  }
  std::vector<Real> cur = x;
  std::vector<Real> next;
  if (cache != nullptr) {
    cache->batch = batch;
    cache->acts.clear();
    cache->acts.push_back(x);
  }
  for (int l = 0; l < layers(); ++l) {
    const int in = sizes_[static_cast<std::size_t>(l)];
    const int o = sizes_[static_cast<std::size_t>(l) + 1];
    next.assign(static_cast<std::size_t>(batch) * o, Real(0));
    forward_layer(be, cur.data(), batch, in, params_.data() + weight_offset(l), params_.data() + bias_offset(l), o,
                  next.data());
    if (l + 1 < layers()) {
      for (Real& v : next) v = v > Real(0) ? v : Real(0);
    }
    cur.swap(next);
    if (cache != nullptr && l + 1 < layers()) cache->acts.push_back(cur);
  }
  out = std::move(cur);
}

template <typename Real>
void Mlp<Real>::backward(const Cache& cache, const std::vector<Real>& d_out, std::vector<Real>& grad,
                         Backend be) const {
  const int batch = cache.batch;
  if (static_cast<int>(cache.acts.size()) != layers() ||
      d_out.size() != static_cast<std::size_t>(batch) * output_size()) {
    throw std::invalid_argument("mlp backward: cache or gradient shape mismatch");
  }
  grad.assign(params_.size(), Real(0));
  std::vector<Real> delta = d_out;
  std::vector<Real> dx;
  for (int l = layers() - 1; l >= 0; --l) {
    const int in = sizes_[static_cast<std::size_t>(l)];
    const int o = sizes_[static_cast<std::size_t>(l) + 1];
    const std::vector<Real>& x = cache.acts[static_cast<std::size_t>(l)];
    Real* dw = grad.data() + weight_offset(l);
    Real* db = grad.data() + bias_offset(l);
    if (be == Backend::OpenMP) omp::dense_backward_weights(delta.data(), x.data(), batch, in, o, dw, db);
    else serial::dense_backward_weights(delta.data(), x.data(), batch, in, o, dw, db);
    if (l == 0) break;
    dx.assign(static_cast<std::size_t>(batch) * in, Real(0));
    const Real* w = params_.data() + weight_offset(l);
    if (be == Backend::OpenMP) omp::dense_backward_input(delta.data(), w, batch, in, o, dx.data());
    else serial::dense_backward_input(delta.data(), w, batch, in, o, dx.data());
    // ReLU derivative, taken as 0 at the kink.
    for (std::size_t i = 0; i < dx.size(); ++i) {
      if (!(x[i] > Real(0))) dx[i] = Real(0);
    }
    delta.swap(dx);
  }
}

template class Mlp<float>;
template class Mlp<double>;

}  // namespace altruist::learn
