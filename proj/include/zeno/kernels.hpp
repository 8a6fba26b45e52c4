#pragma once

#include <complex>
#include <cstddef>

// Dense complex kernels behind the linear-algebra layer.  Two backends: a
// portable scalar reference and an AVX2 variant; the active one is chosen at
// startup from CPU features (override with ZENO_KERNELS=scalar|avx2, intended
// for equivalence testing).  axpy/axpby/rk4_combine/gemm are bit-identical
// across backends (same per-element operation order, no FMA contraction);
// dotc reduces in lanes and may differ in the last bits.
namespace zeno::kern {

using cplx = std::complex<double>;

struct Ops {
  const char* name;
  // y += a*x
  void (*axpy)(std::size_t n, cplx a, const cplx* x, cplx* y);
  // out = a*x + b*y
  void (*axpby)(std::size_t n, cplx a, const cplx* x, cplx b, const cplx* y,
                cplx* out);
  // y += (h/6)*(k1 + 2*k2 + 2*k3 + k4)   (the RK4 state update)
  void (*rk4_combine)(std::size_t n, double h, cplx* y, const cplx* k1,
                      const cplx* k2, const cplx* k3, const cplx* k4);
  // sum_i conj(x[i])*y[i]
  cplx (*dotc)(std::size_t n, const cplx* x, const cplx* y);
  // C(n×p) = A(n×m)·B(m×p), row-major, C overwritten
  void (*gemm)(int n, int m, int p, const cplx* a, const cplx* b, cplx* c);
};

// Backend selected at first use; stable for the process lifetime.
const Ops& ops();

const Ops& scalar_ops();
// Null when this build or CPU lacks AVX2.
const Ops* avx2_ops();
bool avx2_available();
const char* backend_name();

}  // namespace zeno::kern
