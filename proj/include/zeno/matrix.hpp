#pragma once

#include <cassert>
#include <complex>
#include <cstddef>
#include <vector>

#include "zeno/kernels.hpp"

// Small dense complex matrix; row-major, value semantics.  All heavy lifting
// goes through the runtime-dispatched kernels.
namespace zeno {

using cplx = std::complex<double>;

class CMat {
 public:
  CMat() = default;
  CMat(int rows, int cols)
      : rows_(rows), cols_(cols), a_(std::size_t(rows) * cols) {}

  static CMat identity(int n) {
    CMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return a_.size(); }

  cplx& operator()(int i, int j) { return a_[std::size_t(i) * cols_ + j]; }
  const cplx& operator()(int i, int j) const {
    return a_[std::size_t(i) * cols_ + j];
  }

  cplx* data() { return a_.data(); }
  const cplx* data() const { return a_.data(); }
  cplx* row(int i) { return a_.data() + std::size_t(i) * cols_; }
  const cplx* row(int i) const { return a_.data() + std::size_t(i) * cols_; }

  bool same_shape(const CMat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

  void set_zero() { a_.assign(a_.size(), cplx(0.0, 0.0)); }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<cplx> a_;
};

inline CMat matmul(const CMat& a, const CMat& b) {
  assert(a.cols() == b.rows());
  CMat c(a.rows(), b.cols());
  kern::ops().gemm(a.rows(), a.cols(), b.cols(), a.data(), b.data(), c.data());
  return c;
}

inline CMat dagger(const CMat& a) {
  CMat d(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) d(j, i) = std::conj(a(i, j));
  return d;
}

inline cplx trace(const CMat& a) {
  cplx t = 0.0;
  const int n = a.rows() < a.cols() ? a.rows() : a.cols();
  for (int i = 0; i < n; ++i) t += a(i, i);
  return t;
}

// tr(A† B) = sum conj(A_ij) B_ij
inline cplx hs_inner(const CMat& a, const CMat& b) {
  assert(a.same_shape(b));
  return kern::ops().dotc(a.size(), a.data(), b.data());
}

// y += alpha*x, elementwise over the whole storage.
inline void axpy_into(cplx alpha, const CMat& x, CMat& y) {
  assert(x.same_shape(y));
  kern::ops().axpy(x.size(), alpha, x.data(), y.data());
}

// out = alpha*x + beta*y
inline CMat lincomb(cplx alpha, const CMat& x, cplx beta, const CMat& y) {
  assert(x.same_shape(y));
  CMat out(x.rows(), x.cols());
  kern::ops().axpby(x.size(), alpha, x.data(), beta, y.data(), out.data());
  return out;
}

inline CMat operator+(const CMat& a, const CMat& b) {
  return lincomb(1.0, a, 1.0, b);
}
inline CMat operator-(const CMat& a, const CMat& b) {
  return lincomb(1.0, a, -1.0, b);
}
inline CMat operator*(cplx s, const CMat& a) {
  CMat out(a.rows(), a.cols());
  kern::ops().axpby(a.size(), s, a.data(), 0.0, a.data(), out.data());
  return out;
}

inline double max_abs(const CMat& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double v = std::abs(a.data()[i]);
    if (v > m) m = v;
  }
  return m;
}

inline double frob_norm(const CMat& a) {
  return std::sqrt(hs_inner(a, a).real());
}

// Largest |A_ij - conj(A_ji)| — zero for an exactly Hermitian matrix.
inline double hermiticity_defect(const CMat& a) {
  double m = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = i; j < a.cols(); ++j) {
      const double v = std::abs(a(i, j) - std::conj(a(j, i)));
      if (v > m) m = v;
    }
  return m;
}

// (A + A†)/2 in place; cheap guard against roundoff drift.
inline void hermitize(CMat& a) {
  for (int i = 0; i < a.rows(); ++i) {
    a(i, i) = cplx(a(i, i).real(), 0.0);
    for (int j = i + 1; j < a.cols(); ++j) {
      const cplx v = 0.5 * (a(i, j) + std::conj(a(j, i)));
      a(i, j) = v;
      a(j, i) = std::conj(v);
    }
  }
}

}  // namespace zeno
