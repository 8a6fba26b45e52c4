#include "zeno/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

namespace zeno::kern {

namespace {

void axpy_scalar(std::size_t n, cplx a, const cplx* x, cplx* y) {
  const double ar = a.real(), ai = a.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] = cplx(y[i].real() + (ar * xr - ai * xi),
                y[i].imag() + (ar * xi + ai * xr));
  }
}

void axpby_scalar(std::size_t n, cplx a, const cplx* x, cplx b, const cplx* y,
                  cplx* out) {
  const double ar = a.real(), ai = a.imag();
  const double br = b.real(), bi = b.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double yr = y[i].real(), yi = y[i].imag();
    out[i] = cplx((ar * xr - ai * xi) + (br * yr - bi * yi),
                  (ar * xi + ai * xr) + (br * yi + bi * yr));
  }
}

void rk4_combine_scalar(std::size_t n, double h, cplx* y, const cplx* k1,
                        const cplx* k2, const cplx* k3, const cplx* k4) {
  const double w = h / 6.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sr =
        k1[i].real() + 2.0 * (k2[i].real() + k3[i].real()) + k4[i].real();
    const double si =
        k1[i].imag() + 2.0 * (k2[i].imag() + k3[i].imag()) + k4[i].imag();
    y[i] = cplx(y[i].real() + w * sr, y[i].imag() + w * si);
  }
}

cplx dotc_scalar(std::size_t n, const cplx* x, const cplx* y) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double yr = y[i].real(), yi = y[i].imag();
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

// i-k-j loop order: each C[i][j] accumulates over k in ascending order, the
// same order the AVX2 variant uses, so results match bitwise.
void gemm_scalar(int n, int m, int p, const cplx* a, const cplx* b, cplx* c) {
  std::memset(c, 0, sizeof(cplx) * std::size_t(n) * p);
  for (int i = 0; i < n; ++i) {
    cplx* crow = c + std::size_t(i) * p;
    const cplx* arow = a + std::size_t(i) * m;
    for (int k = 0; k < m; ++k) {
      const cplx aik = arow[k];
      if (aik.real() == 0.0 && aik.imag() == 0.0) continue;
      axpy_scalar(std::size_t(p), aik, b + std::size_t(k) * p, crow);
    }
  }
}

const Ops kScalar = {"scalar",     axpy_scalar, axpby_scalar,
                     rk4_combine_scalar, dotc_scalar, gemm_scalar};

const Ops* select_backend() {
  const char* req = std::getenv("ZENO_KERNELS");
  if (req != nullptr) {
    const std::string s(req);
    if (s == "scalar") return &kScalar;
    if (s == "avx2") {
      const Ops* v = avx2_ops();
      if (v == nullptr)
        throw std::runtime_error("ZENO_KERNELS=avx2 but AVX2 is unavailable");
      return v;
    }
    if (!s.empty())
      throw std::runtime_error("unknown ZENO_KERNELS value: " + s);
  }
  const Ops* v = avx2_ops();
  return v != nullptr ? v : &kScalar;
}

}  // namespace

const Ops& scalar_ops() { return kScalar; }

const Ops& ops() {
  static const Ops* active = select_backend();
  return *active;
}

bool avx2_available() { return avx2_ops() != nullptr; }

const char* backend_name() { return ops().name; }

}  // namespace zeno::kern
