#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "zeno/depth.hpp"
#include "zeno/tomography.hpp"

// Parametric bootstrap over tomography datasets: resample counts, re-run the
// reconstruction, re-evaluate a scalar statistic, and report percentile
// confidence intervals.  Deterministic for a fixed seed regardless of worker
// count.
namespace zeno {

enum class StatisticKind {
  POPULATION,          // ρ_ii of the reconstruction (index selects i)
  TRACE_SYM,           // Tr ρ_s
  FISHER_INFO,         // axis-optimized F_Q lower bound
  ENTANGLEMENT_DEPTH,  // producibility bound k from (ρ00, ρ11)
  TRANSVERSE_SPIN,     // (2/N)·√(⟨J_x⟩² + ⟨J_y⟩²)
};

struct StatisticSpec {
  StatisticKind kind = StatisticKind::TRACE_SYM;
  int index = 0;  // POPULATION only
};

const char* statistic_name(StatisticKind kind);

struct BootstrapConfig {
  int replicas = 1000;
  std::uint64_t seed = 0;
  std::vector<double> confidence_levels{0.68, 0.95};
  // Default resamples each point's counts at its observed frequency; the
  // alternative draws from the reconstructed state's forward probabilities
  // (sensitivity analysis).
  bool resample_from_model = false;
  int workers = 1;
};

struct BootstrapInterval {
  double lower = 0.0;
  double upper = 0.0;
};

struct BootstrapResult {
  double point_estimate = 0.0;
  std::vector<double> samples;  // sorted, surviving replicas only
  std::map<double, BootstrapInterval> intervals;
  double standard_deviation = 0.0;
  int dropped_replicas = 0;
};

// Evaluates one statistic on a finished reconstruction (shared by the point
// estimate and every replica).
double evaluate_statistic(const Reconstruction& rec,
                          const SpinOperatorSet& ops,
                          const StatisticSpec& statistic,
                          BoundaryCache& boundaries);

// Full bootstrap: point estimate from `dataset`, then `config.replicas`
// resampled reconstructions.  Replica r draws from an RNG stream derived
// from (seed, r), so results do not depend on scheduling; samples are sorted
// before percentile extraction.  Replicas whose reconstruction throws are
// dropped; more than 5% drops aborts with a diagnostic.
BootstrapResult bootstrap(const TomographyDataset& dataset,
                          const ReconstructionConfig& reconstruct,
                          const StatisticSpec& statistic,
                          const BootstrapConfig& config,
                          BoundaryCache* boundaries = nullptr);

// Percentile with linear interpolation between order statistics on a sorted
// sample (the common "type 7" rule); q in [0, 1].
double percentile(const std::vector<double>& sorted, double q);

// "k (+a/−b)" rendering for integer-valued statistics: point estimate and
// one interval, all rounded to integers.
std::string format_integer_estimate(double point,
                                    const BootstrapInterval& interval);

}  // namespace zeno
