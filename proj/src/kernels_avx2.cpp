#include "zeno/kernels.hpp"

// This translation unit is compiled with -mavx2; everything here stays behind
// the runtime CPU check in avx2_ops().

#if defined(__x86_64__) && defined(__AVX2__)

#include <immintrin.h>

#include <cstring>

namespace zeno::kern {

namespace {

// One __m256d holds two complex doubles as [re0, im0, re1, im1].

// [re,im,...] * (ar + i*ai) without FMA: matches scalar rounding exactly.
inline __m256d cmul_broadcast(__m256d x, __m256d ar, __m256d ai) {
  const __m256d xs = _mm256_permute_pd(x, 0x5);  // [im0, re0, im1, re1]
  return _mm256_addsub_pd(_mm256_mul_pd(x, ar), _mm256_mul_pd(xs, ai));
}

void axpy_avx2(std::size_t n, cplx a, const cplx* x, cplx* y) {
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  const double* xd = reinterpret_cast<const double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
    _mm256_storeu_pd(yd + 2 * i,
                     _mm256_add_pd(yv, cmul_broadcast(xv, ar, ai)));
  }
  for (; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] = cplx(y[i].real() + (a.real() * xr - a.imag() * xi),
                y[i].imag() + (a.real() * xi + a.imag() * xr));
  }
}

void axpby_avx2(std::size_t n, cplx a, const cplx* x, cplx b, const cplx* y,
                cplx* out) {
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  const __m256d br = _mm256_set1_pd(b.real());
  const __m256d bi = _mm256_set1_pd(b.imag());
  const double* xd = reinterpret_cast<const double*>(x);
  const double* yd = reinterpret_cast<const double*>(y);
  double* od = reinterpret_cast<double*>(out);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
    _mm256_storeu_pd(od + 2 * i, _mm256_add_pd(cmul_broadcast(xv, ar, ai),
                                               cmul_broadcast(yv, br, bi)));
  }
  for (; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double yr = y[i].real(), yi = y[i].imag();
    out[i] = cplx((a.real() * xr - a.imag() * xi) +
                      (b.real() * yr - b.imag() * yi),
                  (a.real() * xi + a.imag() * xr) +
                      (b.real() * yi + b.imag() * yr));
  }
}

void rk4_combine_avx2(std::size_t n, double h, cplx* y, const cplx* k1,
                      const cplx* k2, const cplx* k3, const cplx* k4) {
  const __m256d w = _mm256_set1_pd(h / 6.0);
  const __m256d two = _mm256_set1_pd(2.0);
  double* yd = reinterpret_cast<double*>(y);
  const double* d1 = reinterpret_cast<const double*>(k1);
  const double* d2 = reinterpret_cast<const double*>(k2);
  const double* d3 = reinterpret_cast<const double*>(k3);
  const double* d4 = reinterpret_cast<const double*>(k4);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d m23 = _mm256_mul_pd(
        two, _mm256_add_pd(_mm256_loadu_pd(d2 + 2 * i),
                           _mm256_loadu_pd(d3 + 2 * i)));
    const __m256d s = _mm256_add_pd(
        _mm256_add_pd(_mm256_loadu_pd(d1 + 2 * i), m23),
        _mm256_loadu_pd(d4 + 2 * i));
    _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(_mm256_loadu_pd(yd + 2 * i),
                                               _mm256_mul_pd(w, s)));
  }
  const double ws = h / 6.0;
  for (; i < n; ++i) {
    const double sr =
        k1[i].real() + 2.0 * (k2[i].real() + k3[i].real()) + k4[i].real();
    const double si =
        k1[i].imag() + 2.0 * (k2[i].imag() + k3[i].imag()) + k4[i].imag();
    y[i] = cplx(y[i].real() + ws * sr, y[i].imag() + ws * si);
  }
}

cplx dotc_avx2(std::size_t n, const cplx* x, const cplx* y) {
  // Per lane-pair: re += xr*yr + xi*yi, im += xr*yi - xi*yr.
  const __m256d sign = _mm256_set_pd(1.0, -1.0, 1.0, -1.0);
  __m256d re_acc = _mm256_setzero_pd();
  __m256d im_acc = _mm256_setzero_pd();
  const double* xd = reinterpret_cast<const double*>(x);
  const double* yd = reinterpret_cast<const double*>(y);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
    const __m256d xs = _mm256_permute_pd(xv, 0x5);
    re_acc = _mm256_add_pd(re_acc, _mm256_mul_pd(xv, yv));
    im_acc = _mm256_add_pd(im_acc,
                           _mm256_mul_pd(sign, _mm256_mul_pd(xs, yv)));
  }
  alignas(32) double rebuf[4], imbuf[4];
  _mm256_store_pd(rebuf, re_acc);
  _mm256_store_pd(imbuf, im_acc);
  double re = (rebuf[0] + rebuf[2]) + (rebuf[1] + rebuf[3]);
  double im = (imbuf[0] + imbuf[2]) + (imbuf[1] + imbuf[3]);
  for (; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double yr = y[i].real(), yi = y[i].imag();
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

void gemm_avx2(int n, int m, int p, const cplx* a, const cplx* b, cplx* c) {
  std::memset(c, 0, sizeof(cplx) * std::size_t(n) * p);
  for (int i = 0; i < n; ++i) {
    cplx* crow = c + std::size_t(i) * p;
    const cplx* arow = a + std::size_t(i) * m;
    for (int k = 0; k < m; ++k) {
      const cplx aik = arow[k];
      if (aik.real() == 0.0 && aik.imag() == 0.0) continue;
      axpy_avx2(std::size_t(p), aik, b + std::size_t(k) * p, crow);
    }
  }
}

const Ops kAvx2 = {"avx2",        axpy_avx2, axpby_avx2,
                   rk4_combine_avx2, dotc_avx2, gemm_avx2};

}  // namespace

const Ops* avx2_ops() {
  static const Ops* cached =
      __builtin_cpu_supports("avx2") ? &kAvx2 : nullptr;
  return cached;
}

}  // namespace zeno::kern

#else  // non-x86 or AVX2 not enabled for this TU

namespace zeno::kern {
const Ops* avx2_ops() { return nullptr; }
}  // namespace zeno::kern

#endif
