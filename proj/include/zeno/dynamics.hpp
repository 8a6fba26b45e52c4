#pragma once

#include <optional>
#include <vector>

#include "zeno/spin.hpp"

// Time evolution of the collective spin under cavity measurement:
//   S1    — measurement-only master equation (drive + single jump operator
//           d = sqrt(r_m)|0⟩⟨0|; trace-preserving),
//   S3    — S1 plus anti-Hermitian spontaneous-emission loss, diagonal rates
//           γ_n (trace non-increasing),
//   IDEAL — the r_m→∞ limit: unitary drive projected onto the complement of
//           |0⟩ (quantum Zeno dynamics proper).
namespace zeno {

enum class LossKind { NONE, TABLE, IDEAL_CAVITY };

struct LossModel {
  LossKind kind = LossKind::NONE;
  // TABLE: per-Dicke-state amplitude decay rates, length N+1, gamma[0] = 0.
  std::vector<double> gamma_table;
  // IDEAL_CAVITY: γ_n = r_m/(4nC) for n ≥ 1 — the amplitude rate whose
  // population decay 2γ_n reproduces the single-excitation emission event
  // rate r_m/(2nC) of a birefringence-free cavity.
  double cooperativity = 0.0;
  // Atomic linewidth half-width (rad/s); carried for bookkeeping when C is
  // derived from cavity parameters, not used by the rate formula.
  double atomic_halfwidth = 0.0;

  friend bool operator==(const LossModel&, const LossModel&) = default;
};

// Resolves the γ_n table (length N+1) for a model; throws on invalid input.
std::vector<double> loss_rates(const LossModel& loss, int atom_count,
                               double measurement_rate);

struct ZenoConfig {
  DickeBasis basis;
  double rabi_frequency = 0.0;    // Ω (rad/s)
  double measurement_rate = 0.0;  // r_m (1/s)
  LossModel loss;
  double pi_pulse_time = 0.0;  // T = π/Ω (s)
  std::vector<double> time_grid;  // sample times (s), increasing, starts at 0
  double integrator_step = 0.0;   // RK4 step (s)
  double drive_sign = 1.0;        // H = drive_sign · Ω · J_x
  double detection_efficiency = 1.0;  // η: fraction of jumps that register
};

// Largest admissible RK4 step: min(0.01/Ω, 0.1/r_m).
double max_integrator_step(double rabi_frequency, double measurement_rate);

// Checks the config invariants (T·Ω = π, grid increasing from 0, step cap,
// η ∈ [0,1], |drive_sign| = 1).  Throws on violation.
void validate_config(const ZenoConfig& config);

enum class TrajectoryKind { I, II };

struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::I;
  double tilt_angle = 0.0;  // initial Y rotation (kind II); π/10 nominal
  double t_over_T = 0.0;    // drive duration in units of T
};

enum class DynamicsModel { S1, S3, IDEAL };

struct EvolutionRecord {
  std::vector<double> times;
  std::vector<DickeState> states;
  // Conditional runs only: the unnormalized no-click states (trace = no-click
  // probability for η = 1, loss NONE); `states` then holds the renormalized
  // conditional states.
  std::vector<DickeState> raw_states;
  // Conditional runs only: cumulative probability that at least one photon
  // was detected by each sample time (∫ η·r_m·ρ̃₀₀ dt).
  std::vector<double> click_probability;
};

// d = sqrt(r_m)|0⟩⟨0| master-equation right-hand side; requires loss NONE.
// The returned derivative is exactly trace-free.
CMat lindblad_rhs(const DickeState& state, const ZenoConfig& config);

// Adds -{Γ, ρ}, Γ = diag(γ_n); requires loss TABLE or IDEAL_CAVITY.
// d(trace)/dt = -2 Σ γ_n ρ_nn ≤ 0.
CMat lindblad_with_loss_rhs(const DickeState& state,
                            const ZenoConfig& config);

// Unitary step of duration `duration` under H_Z = Π(drive_sign·Ω·J_x)Π with
// Π = 1 - |0⟩⟨0|.  Requires ρ₀₀ < 1e-9 (the state must already live in the
// measurement-protected subspace).
DickeState ideal_qzd_step(const DickeState& state, const ZenoConfig& config,
                          double duration);

// Fixed-step RK4 (S1/S3) or exact spectral stepping (IDEAL) sampled on
// config.time_grid.  IDEAL rejects r_m = 0 (ambiguous: that limit is plain
// Rabi dynamics, not Zeno confinement) and any loss model.
EvolutionRecord evolve(const DickeState& initial, const ZenoConfig& config,
                       DynamicsModel model);

// Evolution conditioned on zero detected photons: the detected fraction η of
// the jump-recycling term is dropped and the trace decays by the detected
// flux η·r_m·ρ₀₀.  Requires model S1/S3 semantics (loss optional).
EvolutionRecord conditional_no_click_evolve(const DickeState& initial,
                                            const ZenoConfig& config);

struct TrajectorySegment {
  enum class Kind { ROTATION, DRIVE } kind;
  CMat unitary;             // ROTATION: exact instantaneous pulse
  double duration = 0.0;    // DRIVE (s)
  double drive_sign = 0.0;  // DRIVE: sign of the J_x drive
  bool measurement_on = false;
};

// Pulse program for a trajectory, starting from |0_N⟩:
//   I :  2π about X, -π about X, drive of -Ω·J_x with measurement on;
//   II:  tilt about Y, π about X, drive of +Ω·J_x with measurement on.
std::vector<TrajectorySegment> trajectory_sequence(
    const TrajectorySpec& spec, const SpinOperatorSet& ops,
    const ZenoConfig& config);

// r_m = 2Φ·sqrt(T₀)
double measurement_rate_from_flux(double photon_flux,
                                  double empty_cavity_transmission);

// Convenience driver used by the pipelines: applies the trajectory preludes
// to |0_N⟩ and integrates the drive over config.time_grid.
EvolutionRecord run_trajectory_grid(const SpinOperatorSet& ops,
                                    const ZenoConfig& config,
                                    const TrajectorySpec& spec,
                                    DynamicsModel model,
                                    bool conditional = false);

}  // namespace zeno
