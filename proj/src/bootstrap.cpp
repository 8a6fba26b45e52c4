#include "zeno/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "zeno/fisher.hpp"
#include "zeno/parallel.hpp"
#include "zeno/rng.hpp"

namespace zeno {

namespace {

constexpr std::uint64_t kReplicaTag = 0x62747374;  // RNG stream label

void validate_bootstrap_config(const BootstrapConfig& config) {
  if (config.replicas < 2)
    throw std::invalid_argument("bootstrap: replicas >= 2");
  if (config.confidence_levels.empty())
    throw std::invalid_argument("bootstrap: at least one confidence level");
  for (double level : config.confidence_levels)
    if (!(level > 0.0) || !(level < 1.0))
      throw std::invalid_argument("bootstrap: levels in (0, 1)");
  if (config.workers < 1)
    throw std::invalid_argument("bootstrap: workers >= 1");
}

}  // namespace

const char* statistic_name(StatisticKind kind) {
  switch (kind) {
    case StatisticKind::POPULATION: return "population";
    case StatisticKind::TRACE_SYM: return "trace_sym";
    case StatisticKind::FISHER_INFO: return "fisher_info";
    case StatisticKind::ENTANGLEMENT_DEPTH: return "entanglement_depth";
    case StatisticKind::TRANSVERSE_SPIN: return "transverse_spin";
  }
  return "unknown";
}

double evaluate_statistic(const Reconstruction& rec,
                          const SpinOperatorSet& ops,
                          const StatisticSpec& statistic,
                          BoundaryCache& boundaries) {
  switch (statistic.kind) {
    case StatisticKind::POPULATION:
      if (statistic.index < 0 || statistic.index > rec.n_max)
        throw std::invalid_argument(
            "bootstrap: population index outside the reconstructed block");
      return rec.rho_s(statistic.index, statistic.index).real();
    case StatisticKind::TRACE_SYM:
      return rec.trace_sym;
    case StatisticKind::FISHER_INFO:
      return fisher_lower_bound(embed_reconstruction(rec, ops.basis))
          .fisher_info;
    case StatisticKind::ENTANGLEMENT_DEPTH:
      return entanglement_depth(rec.rho_s(0, 0).real(),
                                rec.rho_s(1, 1).real(),
                                ops.basis.atom_count, boundaries);
    case StatisticKind::TRANSVERSE_SPIN:
      return transverse_spin_length(embed_reconstruction(rec, ops.basis),
                                    ops);
  }
  throw std::invalid_argument("bootstrap: unknown statistic");
}

double percentile(const std::vector<double>& sorted, double q) {
  if (sorted.empty())
    throw std::invalid_argument("percentile: empty sample");
  if (q <= 0.0) return sorted.front();
  if (q >= 1.0) return sorted.back();
  const double h = q * double(sorted.size() - 1);
  const std::size_t lo = std::size_t(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double f = h - double(lo);
  return sorted[lo] + f * (sorted[lo + 1] - sorted[lo]);
}

std::string format_integer_estimate(double point,
                                    const BootstrapInterval& interval) {
  const long k = std::lround(point);
  const long up = std::lround(interval.upper) - k;
  const long down = k - std::lround(interval.lower);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%ld (+%ld/-%ld)", k, up, down);
  return buf;
}

BootstrapResult bootstrap(const TomographyDataset& dataset,
                          const ReconstructionConfig& reconstruct,
                          const StatisticSpec& statistic,
                          const BootstrapConfig& config,
                          BoundaryCache* boundaries) {
  validate_bootstrap_config(config);
  validate_dataset(dataset);
  BoundaryCache& cache =
      boundaries != nullptr ? *boundaries : shared_boundary_cache();
  const SpinOperatorSet& ops = shared_spin_operators(dataset.atom_count);

  BootstrapResult result;
  const Reconstruction base = mle_reconstruct(dataset, reconstruct, ops);
  result.point_estimate = evaluate_statistic(base, ops, statistic, cache);

  // Per-point resampling probabilities: observed frequencies by default,
  // the fitted model's forward probabilities behind the flag.
  std::vector<double> probs(dataset.points.size());
  if (config.resample_from_model) {
    const DickeState fitted = embed_reconstruction(base, ops.basis);
    for (std::size_t k = 0; k < dataset.points.size(); ++k) {
      const TomographyPoint& pt = dataset.points[k];
      probs[k] = forward_probability(fitted, ops, pt.theta, pt.phi, pt.eps01,
                                     pt.eps10);
    }
  } else {
    for (std::size_t k = 0; k < dataset.points.size(); ++k)
      probs[k] = double(dataset.points[k].high_counts) /
                 double(dataset.points[k].shots);
  }

  std::vector<double> samples(std::size_t(config.replicas));
  std::vector<char> failed(std::size_t(config.replicas), 0);
  parallel_for(config.replicas, config.workers, [&](int r) {
    std::mt19937_64 eng = rng::make_engine(
        rng::derive_seed(config.seed, std::uint64_t(r), kReplicaTag));
    TomographyDataset replica = dataset;
    for (std::size_t k = 0; k < replica.points.size(); ++k)
      replica.points[k].high_counts =
          rng::draw_binomial(eng, replica.points[k].shots, probs[k]);
    try {
      const Reconstruction rec = mle_reconstruct(replica, reconstruct, ops);
      const double value = evaluate_statistic(rec, ops, statistic, cache);
      if (!std::isfinite(value))
        throw std::runtime_error("non-finite statistic");
      samples[std::size_t(r)] = value;
    } catch (const std::exception&) {
      failed[std::size_t(r)] = 1;
    }
  });

  result.samples.reserve(samples.size());
  for (std::size_t r = 0; r < samples.size(); ++r) {
    if (failed[r])
      ++result.dropped_replicas;
    else
      result.samples.push_back(samples[r]);
  }
  if (result.dropped_replicas * 20 > config.replicas) {
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "bootstrap: %d of %d replicas failed reconstruction "
                  "(limit 5%%)",
                  result.dropped_replicas, config.replicas);
    throw std::runtime_error(buf);
  }
  std::sort(result.samples.begin(), result.samples.end());

  for (double level : config.confidence_levels) {
    const double tail = 0.5 * (1.0 - level);
    result.intervals[level] =
        BootstrapInterval{percentile(result.samples, tail),
                          percentile(result.samples, 1.0 - tail)};
  }

  double mean = 0.0;
  for (double v : result.samples) mean += v;
  mean /= double(result.samples.size());
  double var = 0.0;
  for (double v : result.samples) var += (v - mean) * (v - mean);
  result.standard_deviation =
      result.samples.size() > 1
          ? std::sqrt(var / double(result.samples.size() - 1))
          : 0.0;
  return result;
}

}  // namespace zeno
