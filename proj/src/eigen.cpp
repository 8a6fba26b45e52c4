#include "zeno/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace zeno {

namespace {

double offdiag_norm(const CMat& a) {
  double s = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = i + 1; j < a.cols(); ++j) s += std::norm(a(i, j));
  return std::sqrt(2.0 * s);
}

}  // namespace

EighResult eigh(const CMat& h) {
  if (h.rows() != h.cols()) throw std::invalid_argument("eigh: square only");
  const int n = h.rows();
  CMat a = h;
  hermitize(a);
  CMat v = CMat::identity(n);

  const double scale = std::max(frob_norm(a), 1e-300);
  const double tol = 1e-14 * scale;
  const int max_sweeps = 64;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (offdiag_norm(a) <= tol) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double b = std::abs(apq);
        if (b <= 1e-300) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const cplx u = apq / b;  // phase of the off-diagonal entry
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (app - aqq) / (2.0 * b);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // A ← U† A U with U acting on columns (p,q):
        //   col_p' = c·col_p + s·conj(u)·col_q
        //   col_q' = -s·u·col_p + c·col_q
        for (int i = 0; i < n; ++i) {
          const cplx aip = a(i, p), aiq = a(i, q);
          a(i, p) = c * aip + s * std::conj(u) * aiq;
          a(i, q) = -s * u * aip + c * aiq;
        }
        for (int j = 0; j < n; ++j) {
          const cplx apj = a(p, j), aqj = a(q, j);
          a(p, j) = c * apj + s * u * aqj;
          a(q, j) = -s * std::conj(u) * apj + c * aqj;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = cplx(a(p, p).real(), 0.0);
        a(q, q) = cplx(a(q, q).real(), 0.0);

        for (int i = 0; i < n; ++i) {
          const cplx vip = v(i, p), viq = v(i, q);
          v(i, p) = c * vip + s * std::conj(u) * viq;
          v(i, q) = -s * u * vip + c * viq;
        }
      }
    }
  }
  if (offdiag_norm(a) > 1e-10 * scale)
    throw std::runtime_error("eigh: Jacobi sweep limit reached");

  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = a(i, i).real();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return w[x] < w[y]; });

  EighResult out;
  out.w.resize(n);
  out.V = CMat(n, n);
  for (int j = 0; j < n; ++j) {
    out.w[j] = w[order[j]];
    for (int i = 0; i < n; ++i) out.V(i, j) = v(i, order[j]);
  }
  return out;
}

CMat unitary_exp(const CMat& h, double angle) {
  const EighResult e = eigh(h);
  return spectral_apply(
      e, [angle](double w) { return std::polar(1.0, -angle * w); });
}

double uhlmann_fidelity(const CMat& a, const CMat& b) {
  if (!a.same_shape(b) || a.rows() != a.cols())
    throw std::invalid_argument("uhlmann_fidelity: shape mismatch");
  const auto clipped_sqrt = [](double w) {
    return cplx(w > 0.0 ? std::sqrt(w) : 0.0, 0.0);
  };
  const CMat root_a = spectral_apply(eigh(a), clipped_sqrt);
  const CMat inner = matmul(root_a, matmul(b, root_a));
  const EighResult e = eigh(inner);
  double tr_root = 0.0;
  for (double w : e.w)
    if (w > 0.0) tr_root += std::sqrt(w);
  return tr_root * tr_root;
}

}  // namespace zeno
