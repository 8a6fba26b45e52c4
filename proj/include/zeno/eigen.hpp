#pragma once

#include <vector>

#include "zeno/matrix.hpp"

namespace zeno {

// H = V · diag(w) · V†, eigenvalues ascending, V unitary (columns are
// eigenvectors).
struct EighResult {
  std::vector<double> w;
  CMat V;
};

// Cyclic Jacobi for complex Hermitian matrices.  Quadratically convergent;
// sized for the dimensions used here (≤ a few hundred).
EighResult eigh(const CMat& h);

// V · diag(f(w)) · V† for a scalar function of a Hermitian matrix.
template <typename F>
CMat spectral_apply(const EighResult& e, F f) {
  const int n = e.V.rows();
  CMat scaled(n, n);  // columns of V scaled by f(w_j)
  for (int j = 0; j < n; ++j) {
    const cplx fj = f(e.w[j]);
    for (int i = 0; i < n; ++i) scaled(i, j) = fj * e.V(i, j);
  }
  return matmul(scaled, dagger(e.V));
}

// exp(-i·angle·H) for Hermitian H.
CMat unitary_exp(const CMat& h, double angle);

// Uhlmann fidelity F(a, b) = (tr sqrt(sqrt(a)·b·sqrt(a)))² between two
// positive semidefinite matrices; eigenvalues below zero are clipped before
// the square roots.  Symmetric in its arguments; F = 1 iff a = b for unit
// traces.
double uhlmann_fidelity(const CMat& a, const CMat& b);

}  // namespace zeno
