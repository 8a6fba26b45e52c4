#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zeno/spin.hpp"

// The measurement chain: rotate, ask "are all atoms in |0⟩?", fold detection
// errors, repeat.  Reconstruction inverts the chain by iterative maximum
// likelihood on a truncated Dicke basis augmented with a sink dimension that
// absorbs population outside the truncated symmetric subspace, so the
// reported trace estimates Tr ρ_s ≤ 1.
namespace zeno {

struct TomographyGrid {
  std::vector<double> thetas;
  std::vector<double> phis;
  int point_count() const { return int(thetas.size() * phis.size()); }
  // Row-major over (theta, phi).
  double theta_at(int k) const { return thetas[k / int(phis.size())]; }
  double phi_at(int k) const { return phis[k % int(phis.size())]; }
};

// The experimental grid: 7×7 points uniform over [-0.26π, 0.26π]².
TomographyGrid default_tomography_grid();

// ε₀₁: P(read "high" | not all atoms in |0⟩); ε₁₀: P(read "low" | all in
// |0⟩).  Tables hold either one constant or one value per grid point.
struct DetectionErrorModel {
  std::vector<double> eps01{0.0};
  std::vector<double> eps10{0.0};
  double eps01_at(int k) const {
    return eps01.size() == 1 ? eps01[0] : eps01[std::size_t(k)];
  }
  double eps10_at(int k) const {
    return eps10.size() == 1 ? eps10[0] : eps10[std::size_t(k)];
  }
};

DetectionErrorModel constant_errors(double eps01, double eps10);

// Throws unless each table has size 1 or point_count and ε ∈ [0, 0.5).
void validate_errors(const DetectionErrorModel& errors,
                     const TomographyGrid& grid);

// One record per grid point; mirrors the dataset file format.
struct TomographyPoint {
  double theta = 0.0;
  double phi = 0.0;
  int shots = 0;
  int high_counts = 0;
  double eps01 = 0.0;
  double eps10 = 0.0;
};

struct TomographyDataset {
  std::vector<TomographyPoint> points;
  int atom_count = 0;
  std::uint64_t seed = 0;  // provenance of the synthesis, 0 if external
};

void validate_dataset(const TomographyDataset& dataset);

// P(high) = (1-ε₁₀)·P₀ + ε₀₁·(1-P₀)
double forward_probability(const DickeState& state,
                           const SpinOperatorSet& ops, double theta,
                           double phi, double eps01, double eps10);

// Binomial draws of high counts at every grid point; deterministic per seed.
TomographyDataset synthesize_dataset(const DickeState& state,
                                     const SpinOperatorSet& ops,
                                     const TomographyGrid& grid, int shots,
                                     const DetectionErrorModel& errors,
                                     std::uint64_t seed);

struct PovmPair {
  CMat high;  // E_high, (n_max+1)-dimensional
  CMat low;   // 1 - E_high
};

// POVM elements on the truncated reconstruction basis (n = 0..n_max):
// E_high = (1-ε₁₀)·Π₀ + ε₀₁·(1-Π₀) with Π₀ the rotated-ground projector.
std::vector<PovmPair> povm_elements(const TomographyGrid& grid,
                                    const DetectionErrorModel& errors,
                                    const SpinOperatorSet& ops, int n_max);

struct ReconstructionConfig {
  int n_max = 4;
  int max_iterations = 10000;
  // Relative log-likelihood change below this for 10 consecutive iterations
  // stops the iteration.
  double likelihood_tolerance = 1e-10;
  double dilution = 1.0;  // ρ ← (1-α)ρ + α·RρR; 1 = undiluted

  friend bool operator==(const ReconstructionConfig&,
                         const ReconstructionConfig&) = default;
};

struct ReconstructionDiagnostics {
  int iterations = 0;
  bool converged = false;
  double final_log_likelihood = 0.0;
  std::vector<double> log_likelihood_history;
};

struct Reconstruction {
  CMat rho_s;  // (n_max+1)², Hermitian, PSD, trace ≤ 1
  int n_max = 0;
  double trace_sym = 0.0;  // Tr ρ_s (1 - sink population)
  ReconstructionDiagnostics diagnostics;
};

// Iterative RρR maximum likelihood on the truncated basis plus one sink
// dimension (E_high acts there as ε₀₁·1).  Starts from the maximally mixed
// state; log-likelihood is non-decreasing for dilution 1.  Non-convergence
// is reported in diagnostics, never thrown.
Reconstruction mle_reconstruct(const TomographyDataset& dataset,
                               const ReconstructionConfig& config,
                               const SpinOperatorSet& ops);

// Binomial log-likelihood of a truncated state (trace ≤ 1; the missing trace
// is treated as sink population, matching the reconstruction model).
// Probabilities are floored at 1e-9 away from {0, 1}.
double log_likelihood(const CMat& rho_s, const TomographyDataset& dataset,
                      const SpinOperatorSet& ops);

// Reconstruction embedded back into the full (N+1)-dimensional basis.
DickeState embed_reconstruction(const Reconstruction& rec,
                                const DickeBasis& basis);

// Dataset file format: exactly these columns, one row per grid point.
// CSV carries no atom count; the caller supplies it on parse.
std::string dataset_to_csv(const TomographyDataset& dataset);
TomographyDataset dataset_from_csv(const std::string& text, int atom_count);

}  // namespace zeno
