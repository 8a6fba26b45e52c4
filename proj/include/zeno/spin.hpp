#pragma once

#include <vector>

#include "zeno/eigen.hpp"
#include "zeno/matrix.hpp"

// Collective-spin algebra on the symmetric (Dicke) subspace of N qubits:
// basis |n⟩, n = 0..N counts atoms in |1⟩; total spin j = N/2 and the J_z
// eigenvalue of |n⟩ is m = n - N/2.
namespace zeno {

struct DickeBasis {
  int atom_count = 0;  // N
  int dimension() const { return atom_count + 1; }
};

// Density matrix on the symmetric subspace.  Trace may sit below 1: the
// deficit is population outside the symmetric subspace (leakage), which the
// tomography observable cannot see.
struct DickeState {
  DickeBasis basis;
  CMat matrix;
};

// Checks Hermiticity (1e-12 entrywise), positivity (min eigenvalue ≥ -1e-10)
// and trace ∈ [0, 1 + 1e-10]; throws std::invalid_argument with the context
// string on violation.
void validate_state(const DickeState& state, const char* context);

struct SpinOperatorSet {
  DickeBasis basis;
  CMat jx, jy, jz, j_plus, j_minus;
  // Cached spectral decompositions of the rotation generators.
  EighResult jx_eig, jy_eig;
};

// ⟨n+1|J₊|n⟩ = sqrt(j(j+1) - m(m+1)) for n = 0..N-1.
std::vector<double> ladder_coefficients(int atom_count);

// Throws on atom_count < 1.
SpinOperatorSet build_spin_operators(const DickeBasis& basis);

// Process-wide operator sets keyed by atom count, built on first use.
// Construction pays two dense eigendecompositions, so callers that only have
// an atom count (Fisher metrics, bootstrap statistics) share one copy.
// Thread-safe; the returned reference lives for the program's lifetime.
const SpinOperatorSet& shared_spin_operators(int atom_count);

enum class RotationOrder { X_THEN_Y, Y_THEN_X };

struct RotationSpec {
  double theta = 0.0;  // rotation about X (radians)
  double phi = 0.0;    // rotation about Y (radians)
  RotationOrder order = RotationOrder::X_THEN_Y;
};

// X_THEN_Y: R(θ,φ) = exp(-iφJ_y)·exp(-iθJ_x) — the θ pulse fires first.
// One fixed convention used for both synthesis and reconstruction, so it
// cancels in round trips.
CMat rotation_operator(const SpinOperatorSet& ops, const RotationSpec& spec);

// Column R(θ,φ)|0⟩ without forming the full rotation matrix.
std::vector<cplx> rotated_ground(const SpinOperatorSet& ops,
                                 const RotationSpec& spec);

enum class NamedState {
  ALL_ZERO,  // |0_N⟩⟨0_N|
  ALL_ONE,   // |N_N⟩⟨N_N|
  W,         // |1_N⟩⟨1_N|
  COHERENT,  // R(θ,φ)|0_N⟩⟨0_N|R†
};

DickeState named_state(const SpinOperatorSet& ops, NamedState which,
                       double theta = 0.0, double phi = 0.0);

// P₀(θ,φ) = ⟨0_N| R† ρ R |0_N⟩ — the probability that a transmission
// measurement after the tomography rotation finds all atoms in |0⟩.
double p_zero(const DickeState& state, const SpinOperatorSet& ops,
              const RotationSpec& spec);

// Q(θ,φ) = (N+1)/(4π) · P₀(θ,φ); integrates to trace(ρ) over the sphere.
double husimi_q(const DickeState& state, const SpinOperatorSet& ops,
                const RotationSpec& spec);

// ∫ Q dΩ by the product rule that is exact for this integrand:
// Gauss–Legendre in sin θ × uniform in φ, (2N+2)² nodes.
double husimi_sphere_integral(const DickeState& state,
                              const SpinOperatorSet& ops);

// tr(ρ·A); throws on dimension mismatch.
cplx expectation(const DickeState& state, const CMat& op);

// (2/N)·sqrt(⟨J_x⟩² + ⟨J_y⟩²)
double transverse_spin_length(const DickeState& state,
                              const SpinOperatorSet& ops);

}  // namespace zeno
