#include "zeno/fisher.hpp"

#include <cmath>
#include <stdexcept>

namespace zeno {

namespace {

constexpr double kPairCutoff = 1e-14;

// Eigenbasis data shared by the Fisher evaluations: clipped eigenvalues and
// the operator matrix elements A_a(j,k) = ⟨j|J_a|k⟩.
struct FisherBasis {
  std::vector<double> p;
  CMat ax, ay, az;
};

CMat conjugated(const CMat& v, const CMat& op) {
  return matmul(dagger(v), matmul(op, v));
}

FisherBasis make_basis(const DickeState& state) {
  validate_state(state, "fisher_information");
  const SpinOperatorSet& ops =
      shared_spin_operators(state.basis.atom_count);
  const EighResult e = eigh(state.matrix);
  FisherBasis fb;
  fb.p.reserve(e.w.size());
  for (double w : e.w) fb.p.push_back(w > 0.0 ? w : 0.0);
  fb.ax = conjugated(e.V, ops.jx);
  fb.ay = conjugated(e.V, ops.jy);
  fb.az = conjugated(e.V, ops.jz);
  return fb;
}

// 2·(p_j − p_k)²/(p_j + p_k), or 0 when the pair is below the cutoff.
double pair_weight(double pj, double pk) {
  const double sum = pj + pk;
  if (sum <= kPairCutoff) return 0.0;
  const double diff = pj - pk;
  return 2.0 * diff * diff / sum;
}

std::array<double, 3> normalized_axis(const std::array<double, 3>& axis) {
  const double norm = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] +
                                axis[2] * axis[2]);
  if (std::abs(norm - 1.0) > 1e-6)
    throw std::invalid_argument("fisher_information: axis must be unit");
  return {axis[0] / norm, axis[1] / norm, axis[2] / norm};
}

// Deterministic sign: make the first component above noise positive.
void fix_sign(std::array<double, 3>& n) {
  for (double c : n) {
    if (std::abs(c) > 1e-12) {
      if (c < 0.0)
        for (double& x : n) x = -x;
      return;
    }
  }
}

}  // namespace

SpectralDecomposition spectral_decomposition(const DickeState& state) {
  validate_state(state, "spectral_decomposition");
  EighResult e = eigh(state.matrix);
  SpectralDecomposition out;
  out.eigenvalues.reserve(e.w.size());
  for (double w : e.w) out.eigenvalues.push_back(w > 0.0 ? w : 0.0);
  out.eigenvectors = std::move(e.V);
  return out;
}

double fisher_information(const DickeState& state,
                          const std::array<double, 3>& axis) {
  const std::array<double, 3> n = normalized_axis(axis);
  const FisherBasis fb = make_basis(state);
  const int d = int(fb.p.size());
  double total = 0.0;
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      const double w = pair_weight(fb.p[j], fb.p[k]);
      if (w == 0.0) continue;
      const cplx elem = n[0] * fb.ax(j, k) + n[1] * fb.ay(j, k) +
                        n[2] * fb.az(j, k);
      total += w * std::norm(elem);
    }
  }
  return total;
}

FisherAxisResult optimize_fisher_axis(const DickeState& state) {
  const FisherBasis fb = make_basis(state);
  const int d = int(fb.p.size());
  const CMat* a[3] = {&fb.ax, &fb.ay, &fb.az};
  double m[3][3] = {};
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      const double w = pair_weight(fb.p[j], fb.p[k]);
      if (w == 0.0) continue;
      for (int r = 0; r < 3; ++r)
        for (int s = r; s < 3; ++s)
          m[r][s] += w * ((*a[r])(j, k) * std::conj((*a[s])(j, k))).real();
    }
  }
  CMat mmat(3, 3);
  for (int r = 0; r < 3; ++r)
    for (int s = r; s < 3; ++s) {
      mmat(r, s) = m[r][s];
      mmat(s, r) = m[r][s];
    }
  const EighResult e = eigh(mmat);
  const double top = e.w[2];
  const double degeneracy_gap = 1e-9 * std::max(1.0, std::abs(top));

  // Among eigenvectors tied for the maximum, project the coordinate axes
  // onto the degenerate subspace in order; the first non-vanishing
  // projection maximizes |n_x|, then |n_y|, then |n_z| — the lexicographic
  // tie-break.
  std::array<double, 3> axis{0.0, 0.0, 0.0};
  for (int coord = 0; coord < 3; ++coord) {
    std::array<double, 3> proj{0.0, 0.0, 0.0};
    for (int j = 0; j < 3; ++j) {
      if (e.w[j] < top - degeneracy_gap) continue;
      // M is real symmetric, so eigenvectors are real up to rounding.
      const double overlap = e.V(coord, j).real();
      for (int i = 0; i < 3; ++i) proj[i] += overlap * e.V(i, j).real();
    }
    const double norm = std::sqrt(proj[0] * proj[0] + proj[1] * proj[1] +
                                  proj[2] * proj[2]);
    if (norm > 1e-8) {
      for (int i = 0; i < 3; ++i) axis[i] = proj[i] / norm;
      break;
    }
  }
  fix_sign(axis);

  FisherAxisResult out;
  out.axis = axis;
  // Report nᵀMn for the returned axis rather than the raw eigenvalue so the
  // quadratic-form identity holds exactly.
  double quad = 0.0;
  for (int r = 0; r < 3; ++r)
    for (int s = 0; s < 3; ++s)
      quad += axis[r] * mmat(r, s).real() * axis[s];
  out.fisher_info = quad;
  return out;
}

FisherBound fisher_lower_bound(const DickeState& state_s) {
  const FisherAxisResult best = optimize_fisher_axis(state_s);
  FisherBound out;
  out.fisher_info = best.fisher_info;
  out.fisher_per_atom = best.fisher_info / state_s.basis.atom_count;
  out.axis = best.axis;
  // A product state saturates F = N exactly; require a margin beyond rounding
  // noise in the axis optimization before certifying entanglement.
  const double n = state_s.basis.atom_count;
  out.entangled = best.fisher_info > n * (1.0 + 1e-9);
  return out;
}

double nonsymmetric_fisher_correction(const DickeState& state_s,
                                      int atom_count, double n_sp) {
  if (n_sp < 0.0 || n_sp > atom_count)
    throw std::invalid_argument(
        "nonsymmetric_fisher_correction: n_sp must lie in [0, N]");
  const double tr = trace(state_s.matrix).real();
  if (tr > 1.0 + 1e-10)
    throw std::invalid_argument(
        "nonsymmetric_fisher_correction: symmetric trace exceeds 1");
  const double missing = tr < 1.0 ? 1.0 - tr : 0.0;
  return (atom_count - n_sp) * missing;
}

void validate_report(const EntanglementReport& report, int atom_count) {
  if (report.fisher_info < 0.0)
    throw std::invalid_argument("report: fisher_info < 0");
  const auto& n = report.optimal_axis;
  const double norm = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
  if (std::abs(norm - 1.0) > 1e-12)
    throw std::invalid_argument("report: axis not unit length");
  if (report.depth_bound < 1 || report.depth_bound > atom_count)
    throw std::invalid_argument("report: depth outside [1, N]");
}

}  // namespace zeno
