#include "zeno/spin.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "zeno/quadrature.hpp"

namespace zeno {

void validate_state(const DickeState& state, const char* context) {
  const std::string where(context);
  if (state.matrix.rows() != state.basis.dimension() ||
      state.matrix.cols() != state.basis.dimension())
    throw std::invalid_argument(where + ": state dimension mismatch");
  if (hermiticity_defect(state.matrix) > 1e-12)
    throw std::invalid_argument(where + ": state is not Hermitian");
  const double tr = trace(state.matrix).real();
  if (tr < -1e-12 || tr > 1.0 + 1e-10)
    throw std::invalid_argument(where + ": state trace outside [0, 1]");
  const EighResult e = eigh(state.matrix);
  if (e.w.front() < -1e-10)
    throw std::invalid_argument(where + ": state is not positive");
}

std::vector<double> ladder_coefficients(int atom_count) {
  const double j = atom_count / 2.0;
  std::vector<double> c(atom_count);
  for (int n = 0; n < atom_count; ++n) {
    const double m = n - j;
    c[n] = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
  }
  return c;
}

SpinOperatorSet build_spin_operators(const DickeBasis& basis) {
  const int n_atoms = basis.atom_count;
  if (n_atoms < 1)
    throw std::invalid_argument("build_spin_operators: atom_count >= 1");
  const int d = basis.dimension();
  SpinOperatorSet ops;
  ops.basis = basis;
  ops.jx = CMat(d, d);
  ops.jy = CMat(d, d);
  ops.jz = CMat(d, d);
  ops.j_plus = CMat(d, d);
  ops.j_minus = CMat(d, d);

  const std::vector<double> c = ladder_coefficients(n_atoms);
  for (int n = 0; n < d; ++n) ops.jz(n, n) = n - n_atoms / 2.0;
  for (int n = 0; n + 1 < d; ++n) {
    ops.j_plus(n + 1, n) = c[n];
    ops.j_minus(n, n + 1) = c[n];
    ops.jx(n + 1, n) = 0.5 * c[n];
    ops.jx(n, n + 1) = 0.5 * c[n];
    ops.jy(n + 1, n) = cplx(0.0, -0.5) * c[n];
    ops.jy(n, n + 1) = cplx(0.0, 0.5) * c[n];
  }
  ops.jx_eig = eigh(ops.jx);
  ops.jy_eig = eigh(ops.jy);
  return ops;
}

const SpinOperatorSet& shared_spin_operators(int atom_count) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<SpinOperatorSet>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(atom_count);
  if (it == cache.end()) {
    auto ops = std::make_unique<SpinOperatorSet>(
        build_spin_operators(DickeBasis{atom_count}));
    it = cache.emplace(atom_count, std::move(ops)).first;
  }
  return *it->second;
}

namespace {

// exp(-i·angle·J) |v⟩ through the cached decomposition.
std::vector<cplx> apply_axis_rotation(const EighResult& e, double angle,
                                      const std::vector<cplx>& v) {
  const int d = e.V.rows();
  std::vector<cplx> coeff(d, 0.0), out(d, 0.0);
  for (int j = 0; j < d; ++j) {
    cplx s = 0.0;
    for (int i = 0; i < d; ++i) s += std::conj(e.V(i, j)) * v[i];
    coeff[j] = std::polar(1.0, -angle * e.w[j]) * s;
  }
  for (int i = 0; i < d; ++i) {
    cplx s = 0.0;
    for (int j = 0; j < d; ++j) s += e.V(i, j) * coeff[j];
    out[i] = s;
  }
  return out;
}

void require_finite_angles(const RotationSpec& spec) {
  if (!std::isfinite(spec.theta) || !std::isfinite(spec.phi))
    throw std::invalid_argument("rotation: angles must be finite");
}

}  // namespace

CMat rotation_operator(const SpinOperatorSet& ops, const RotationSpec& spec) {
  require_finite_angles(spec);
  const CMat rx = spectral_apply(ops.jx_eig, [&](double w) {
    return std::polar(1.0, -spec.theta * w);
  });
  const CMat ry = spectral_apply(ops.jy_eig, [&](double w) {
    return std::polar(1.0, -spec.phi * w);
  });
  return spec.order == RotationOrder::X_THEN_Y ? matmul(ry, rx)
                                               : matmul(rx, ry);
}

std::vector<cplx> rotated_ground(const SpinOperatorSet& ops,
                                 const RotationSpec& spec) {
  require_finite_angles(spec);
  std::vector<cplx> v(ops.basis.dimension(), 0.0);
  v[0] = 1.0;
  if (spec.order == RotationOrder::X_THEN_Y) {
    v = apply_axis_rotation(ops.jx_eig, spec.theta, v);
    v = apply_axis_rotation(ops.jy_eig, spec.phi, v);
  } else {
    v = apply_axis_rotation(ops.jy_eig, spec.phi, v);
    v = apply_axis_rotation(ops.jx_eig, spec.theta, v);
  }
  return v;
}

DickeState named_state(const SpinOperatorSet& ops, NamedState which,
                       double theta, double phi) {
  const int d = ops.basis.dimension();
  DickeState state{ops.basis, CMat(d, d)};
  switch (which) {
    case NamedState::ALL_ZERO:
      state.matrix(0, 0) = 1.0;
      break;
    case NamedState::ALL_ONE:
      state.matrix(d - 1, d - 1) = 1.0;
      break;
    case NamedState::W:
      state.matrix(1, 1) = 1.0;
      break;
    case NamedState::COHERENT: {
      const std::vector<cplx> c =
          rotated_ground(ops, RotationSpec{theta, phi});
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          state.matrix(i, j) = c[i] * std::conj(c[j]);
      break;
    }
  }
  return state;
}

double p_zero(const DickeState& state, const SpinOperatorSet& ops,
              const RotationSpec& spec) {
  const std::vector<cplx> c = rotated_ground(ops, spec);
  const int d = state.basis.dimension();
  // ⟨c|ρ|c⟩
  cplx acc = 0.0;
  for (int i = 0; i < d; ++i) {
    cplx row = 0.0;
    for (int j = 0; j < d; ++j) row += state.matrix(i, j) * c[j];
    acc += std::conj(c[i]) * row;
  }
  return acc.real();
}

double husimi_q(const DickeState& state, const SpinOperatorSet& ops,
                const RotationSpec& spec) {
  const double norm =
      (state.basis.atom_count + 1) / (4.0 * std::numbers::pi);
  return norm * p_zero(state, ops, spec);
}

double husimi_sphere_integral(const DickeState& state,
                              const SpinOperatorSet& ops) {
  // R(θ,φ)|0⟩ covers the sphere once for θ ∈ [-π/2, π/2], φ ∈ [0, 2π) with
  // area element cos θ dθ dφ, so substitute s = sin θ and integrate with
  // Gauss–Legendre in s and the uniform (trapezoid) rule in φ.  Both
  // directions are exact for the polynomial/trigonometric integrand.
  const int n_nodes = 2 * state.basis.atom_count + 2;
  const GaussLegendre gl = gauss_legendre(n_nodes);
  const double dphi = 2.0 * std::numbers::pi / n_nodes;
  double total = 0.0;
  for (int i = 0; i < n_nodes; ++i) {
    const double theta = std::asin(gl.nodes[i]);
    double ring = 0.0;
    for (int k = 0; k < n_nodes; ++k)
      ring += husimi_q(state, ops, RotationSpec{theta, k * dphi});
    total += gl.weights[i] * ring * dphi;
  }
  return total;
}

cplx expectation(const DickeState& state, const CMat& op) {
  if (!state.matrix.same_shape(op))
    throw std::invalid_argument("expectation: operator dimension mismatch");
  // tr(ρA) = Σ_ij conj(ρ_ji) A_ij = ⟨ρ, A⟩ for Hermitian ρ.
  return hs_inner(state.matrix, op);
}

double transverse_spin_length(const DickeState& state,
                              const SpinOperatorSet& ops) {
  const double mx = expectation(state, ops.jx).real();
  const double my = expectation(state, ops.jy).real();
  return 2.0 / ops.basis.atom_count * std::hypot(mx, my);
}

}  // namespace zeno
