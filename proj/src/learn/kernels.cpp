#include "altruist/learn/kernels.hpp"

#include <omp.h>

namespace altruist::learn {
namespace {

// Eight interleaved partial sums in a fixed order: vectorizable without
// reassociation, and identical for both kernel variants.
template <typename Real>
inline Real dot(const Real* a, const Real* b, int n) {
  constexpr int kLanes = 8;
  Real part[kLanes] = {};
  int k = 0;
  for (; k + kLanes <= n; k += kLanes) {
    for (int j = 0; j < kLanes; ++j) part[j] += a[k + j] * b[k + j];
  }
  Real s = 0;
  for (; k < n; ++k) s += a[k] * b[k];
  for (int j = 0; j < kLanes; ++j) s += part[j];
  return s;
}

int g_threads = 0;

int threads() { return g_threads > 0 ? g_threads : omp_get_max_threads(); }

}  // namespace

void set_kernel_threads(int n) { g_threads = n; }

namespace serial {

template <typename Real>
void dense_forward(const Real* x, int batch, int in, const Real* w, const Real* b, int out, Real* y) {
  for (int i = 0; i < batch; ++i) {
    for (int o = 0; o < out; ++o) y[i * out + o] = b[o] + dot(x + static_cast<std::size_t>(i) * in, w + static_cast<std::size_t>(o) * in, in);
  }
}

template <typename Real>
void dense_backward_weights(const Real* dy, const Real* x, int batch, int in, int out, Real* dw, Real* db) {
  for (int o = 0; o < out; ++o) {
    Real* row = dw + static_cast<std::size_t>(o) * in;
    for (int k = 0; k < in; ++k) row[k] = 0;
    Real bias = 0;
    for (int i = 0; i < batch; ++i) {
      const Real g = dy[i * out + o];
      bias += g;
      const Real* xi = x + static_cast<std::size_t>(i) * in;
      for (int k = 0; k < in; ++k) row[k] += g * xi[k];
    }
    db[o] = bias;
  }
}

template <typename Real>
void dense_backward_input(const Real* dy, const Real* w, int batch, int in, int out, Real* dx) {
  for (int i = 0; i < batch; ++i) {
    Real* row = dx + static_cast<std::size_t>(i) * in;
    for (int k = 0; k < in; ++k) row[k] = 0;
    for (int o = 0; o < out; ++o) {
      const Real g = dy[i * out + o];
      const Real* wo = w + static_cast<std::size_t>(o) * in;
      for (int k = 0; k < in; ++k) row[k] += g * wo[k];
    }
  }
}

}  // namespace serial

namespace omp {

template <typename Real>
void dense_forward(const Real* x, int batch, int in, const Real* w, const Real* b, int out, Real* y) {
  const long total = static_cast<long>(batch) * out;
#pragma omp parallel for schedule(static) num_threads(threads())
  for (long idx = 0; idx < total; ++idx) {
    const int i = static_cast<int>(idx / out);
    const int o = static_cast<int>(idx % out);
    y[idx] = b[o] + dot(x + static_cast<std::size_t>(i) * in, w + static_cast<std::size_t>(o) * in, in);
  }
}

template <typename Real>
void dense_backward_weights(const Real* dy, const Real* x, int batch, int in, int out, Real* dw, Real* db) {
#pragma omp parallel for schedule(static) num_threads(threads())
  for (int o = 0; o < out; ++o) {
    Real* row = dw + static_cast<std::size_t>(o) * in;
    for (int k = 0; k < in; ++k) row[k] = 0;
    Real bias = 0;
    for (int i = 0; i < batch; ++i) {
      const Real g = dy[i * out + o];
      bias += g;
      const Real* xi = x + static_cast<std::size_t>(i) * in;
      for (int k = 0; k < in; ++k) row[k] += g * xi[k];
    }
    db[o] = bias;
  }
}

template <typename Real>
void dense_backward_input(const Real* dy, const Real* w, int batch, int in, int out, Real* dx) {
#pragma omp parallel for schedule(static) num_threads(threads())
  for (int i = 0; i < batch; ++i) {
    Real* row = dx + static_cast<std::size_t>(i) * in;
    for (int k = 0; k < in; ++k) row[k] = 0;
    for (int o = 0; o < out; ++o) {
      const Real g = dy[i * out + o];
      const Real* wo = w + static_cast<std::size_t>(o) * in;
      for (int k = 0; k < in; ++k) row[k] += g * wo[k];
    }
  }
}

}  // namespace omp

#define ALTRUIST_INSTANTIATE(NS, Real)                                                                       \
  template void NS::dense_forward<Real>(const Real*, int, int, const Real*, const Real*, int, Real*);        \
  template void NS::dense_backward_weights<Real>(const Real*, const Real*, int, int, int, Real*, Real*);     \
  template void NS::dense_backward_input<Real>(const Real*, const Real*, int, int, int, Real*);

ALTRUIST_INSTANTIATE(serial, float)
ALTRUIST_INSTANTIATE(serial, double)
ALTRUIST_INSTANTIATE(omp, float)
ALTRUIST_INSTANTIATE(omp, double)
#undef ALTRUIST_INSTANTIATE

}  // namespace altruist::learn
