#pragma once

#include <cstddef>

// Dense-layer kernels. Every output element is accumulated in the same fixed
// order by both variants, so the OpenMP versions reproduce the serial ones
// bit for bit. Matrices are row-major: X is batch x in, W is out x in.
namespace altruist::learn {

enum class Backend { Serial, OpenMP };

namespace serial {

template <typename Real>
void dense_forward(const Real* x, int batch, int in, const Real* w, const Real* b, int out, Real* y);

/// dW = dY^T X, db = column sums of dY (overwrites).
template <typename Real>
void dense_backward_weights(const Real* dy, const Real* x, int batch, int in, int out, Real* dw, Real* db);

/// dX = dY W (overwrites).
template <typename Real>
void dense_backward_input(const Real* dy, const Real* w, int batch, int in, int out, Real* dx);

}  // namespace serial

namespace omp {

template <typename Real>
void dense_forward(const Real* x, int batch, int in, const Real* w, const Real* b, int out, Real* y);
template <typename Real>
void dense_backward_weights(const Real* dy, const Real* x, int batch, int in, int out, Real* dw, Real* db);
template <typename Real>
void dense_backward_input(const Real* dy, const Real* w, int batch, int in, int out, Real* dx);

}  // namespace omp

/// Number of OpenMP threads the parallel kernels may use (0 keeps the runtime default).
void set_kernel_threads(int n);

}  // namespace altruist::learn
