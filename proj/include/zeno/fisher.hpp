#pragma once

#include <array>

#include "zeno/spin.hpp"

// Quantum Fisher information of a collective-spin state: F_Q for a rotation
// generated by J_n, maximized exactly over the axis n through the 3×3
// quadratic form F_Q(n) = nᵀMn.  Evaluated on the symmetric block only, so
// the result is a certified lower bound whenever trace(ρ_s) < 1.
namespace zeno {

struct SpectralDecomposition {
  std::vector<double> eigenvalues;  // ascending, clipped at 0
  CMat eigenvectors;                // orthonormal columns
};

// Eigendecomposition of a valid state; negative rounding noise on the
// eigenvalues is clipped so they form a probability-like vector summing to
// trace(ρ).
SpectralDecomposition spectral_decomposition(const DickeState& state);

// F_Q(ρ, n) = 2 Σ_{j,k} (p_j − p_k)²/(p_j + p_k) |⟨j|J_n|k⟩|², with pairs
// below p_j + p_k ≤ 1e−14 dropped.  The axis must be unit length (1e−6).
double fisher_information(const DickeState& state,
                          const std::array<double, 3>& axis);

struct FisherAxisResult {
  std::array<double, 3> axis;  // unit vector
  double fisher_info = 0.0;
};

// Exact maximization of F_Q over the axis: builds M_ab =
// 2 Σ (p_j − p_k)²/(p_j + p_k) Re[⟨j|J_a|k⟩⟨k|J_b|j⟩] and returns the top
// eigenpair.  Degenerate maxima are broken deterministically: the axis with
// lexicographically largest (|n_x|, |n_y|, |n_z|), first nonzero component
// positive.
FisherAxisResult optimize_fisher_axis(const DickeState& state);

struct FisherBound {
  double fisher_info = 0.0;
  double fisher_per_atom = 0.0;
  std::array<double, 3> axis{1.0, 0.0, 0.0};
  bool entangled = false;  // fisher_info > N
};

// Axis-optimized F_Q of the symmetric block (trace ≤ 1).  Monotonicity of
// F_Q under the symmetric projection makes this a lower bound for the full
// state; F_Q > N certifies entanglement (sufficient, not necessary).
FisherBound fisher_lower_bound(const DickeState& state_s);

// Size estimate of the Fisher information carried by the non-symmetric
// sector: (N − n_sp)·(1 − trace(ρ_s)), with n_sp the expected number of
// spontaneous emissions.  Reported separately — never folded into the
// certified bound.  Rejects n_sp < 0 or n_sp > N.
double nonsymmetric_fisher_correction(const DickeState& state_s,
                                      int atom_count, double n_sp);

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
};

// Summary row for a reconstructed state: certified Fisher bound, its optimal
// axis, the producibility depth bound, and bootstrap intervals on F_Q.
struct EntanglementReport {
  double fisher_info = 0.0;
  double fisher_per_atom = 0.0;
  std::array<double, 3> optimal_axis{1.0, 0.0, 0.0};
  int depth_bound = 1;
  ConfidenceInterval fisher_ci68;
  ConfidenceInterval fisher_ci95;
};

// Field invariants: F_Q ≥ 0, unit axis (1e−12), 1 ≤ depth ≤ N.
void validate_report(const EntanglementReport& report, int atom_count);

}  // namespace zeno
