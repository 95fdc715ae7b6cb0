#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "altruist/learn/kernels.hpp"

namespace altruist::learn {

/// Fully connected network with ReLU hidden layers and a linear output.
/// All weights live in one flat vector: per layer, W (out x in) then b.
template <typename Real>
class Mlp {
 public:
  Mlp() = default;
  /// `sizes` = {inputs, hidden..., outputs}; weights start at zero.
  explicit Mlp(std::vector<int> sizes);

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
  void init(std::mt19937_64& rng);

  const std::vector<int>& sizes() const { return sizes_; }
  int layers() const { return static_cast<int>(sizes_.size()) - 1; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  std::size_t param_count() const { return params_.size(); }
  std::vector<Real>& params() { return params_; }
  const std::vector<Real>& params() const { return params_; }
  std::size_t weight_offset(int layer) const { return offsets_[static_cast<std::size_t>(layer)]; }
  std::size_t bias_offset(int layer) const;

  /// Per-layer activations kept for the backward pass; acts[0] is the input.
  struct Cache {
    int batch = 0;
    std::vector<std::vector<Real>> acts;
  };

  /// Row-major batch forward. Throws std::invalid_argument if `x` has the wrong size.
  void forward(const std::vector<Real>& x, int batch, std::vector<Real>& out, Backend be = Backend::Serial,
               Cache* cache = nullptr) const;

  /// Gradient of the loss w.r.t. all parameters given dLoss/dOutput.
  void backward(const Cache& cache, const std::vector<Real>& d_out, std::vector<Real>& grad,
                Backend be = Backend::Serial) const;

  template <typename Other>
  void copy_params_from(const Mlp<Other>& other) {
    params_.assign(other.params().begin(), other.params().end());
  }

  friend bool operator==(const Mlp&, const Mlp&) = default;

 private:
  std::vector<int> sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<Real> params_;
};

extern template class Mlp<float>;
extern template class Mlp<double>;

}  // namespace altruist::learn
