#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "zeno/bootstrap.hpp"
#include "zeno/depth.hpp"
#include "zeno/fisher.hpp"
#include "zeno/spin.hpp"
#include "zeno/tomography.hpp"

namespace {

using zeno::CMat;
constexpr double kPi = std::numbers::pi;

// A mildly entangled mixed truth with sub-unit symmetric trace; cheap enough
// to reconstruct hundreds of times.
zeno::DickeState mixed_truth(const zeno::SpinOperatorSet& ops) {
  auto s = zeno::named_state(ops, zeno::NamedState::W);
  const int n = s.matrix.rows();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s.matrix(i, j) *= 0.62;
  s.matrix(0, 0) += 0.21;
  s.matrix(2, 2) += 0.05;
  // Remaining 12% of the weight lives outside the truncated window.
  s.matrix(20, 20) += 0.12;
  return s;
}

zeno::TomographyDataset standard_dataset(const zeno::SpinOperatorSet& ops,
                                         std::uint64_t seed, int shots = 50) {
  const auto truth = mixed_truth(ops);
  return zeno::synthesize_dataset(truth, ops, zeno::default_tomography_grid(),
                                  shots, zeno::constant_errors(0.05, 0.05),
                                  seed);
}

bool identical_results(const zeno::BootstrapResult& a,
                       const zeno::BootstrapResult& b) {
  if (a.samples.size() != b.samples.size()) return false;
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    if (a.samples[i] != b.samples[i]) return false;
  if (a.point_estimate != b.point_estimate) return false;
  if (a.intervals.size() != b.intervals.size()) return false;
  for (const auto& [level, iv] : a.intervals) {
    const auto it = b.intervals.find(level);
    if (it == b.intervals.end()) return false;
    if (iv.lower != it->second.lower || iv.upper != it->second.upper)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("percentile follows the interpolating order-statistic rule") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  CHECK(zeno::percentile(v, 0.0) == 1.0);
  CHECK(zeno::percentile(v, 1.0) == 4.0);
  CHECK(zeno::percentile(v, 0.5) == doctest::Approx(2.5));
  // h = q·(n-1): q = 1/3 lands exactly on the second order statistic.
  CHECK(zeno::percentile(v, 1.0 / 3.0) == doctest::Approx(2.0));
  CHECK(zeno::percentile(v, 0.25) == doctest::Approx(1.75));
  const std::vector<double> single{7.0};
  CHECK(zeno::percentile(single, 0.3) == 7.0);
}

TEST_CASE("statistic names are stable identifiers") {
  CHECK(std::string(zeno::statistic_name(zeno::StatisticKind::POPULATION)) ==
        "population");
  CHECK(std::string(zeno::statistic_name(zeno::StatisticKind::TRACE_SYM)) ==
        "trace_sym");
  CHECK(std::string(zeno::statistic_name(zeno::StatisticKind::FISHER_INFO)) ==
        "fisher_info");
  CHECK(std::string(zeno::statistic_name(
            zeno::StatisticKind::ENTANGLEMENT_DEPTH)) == "entanglement_depth");
  CHECK(std::string(zeno::statistic_name(
            zeno::StatisticKind::TRANSVERSE_SPIN)) == "transverse_spin");
}

TEST_CASE("integer estimate formatting") {
  zeno::BootstrapInterval iv{6.2, 10.7};
  CHECK(zeno::format_integer_estimate(9.0, iv) == "9 (+2/-3)");
  zeno::BootstrapInterval tight{9.0, 9.0};
  CHECK(zeno::format_integer_estimate(9.0, tight) == "9 (+0/-0)");
}

TEST_CASE("evaluate_statistic covers every kind") {
  const int atoms = 36;
  const auto& ops = zeno::shared_spin_operators(atoms);
  const auto data = standard_dataset(ops, 11, 400);
  zeno::ReconstructionConfig rc;
  const auto rec = zeno::mle_reconstruct(data, rc, ops);
  auto& cache = zeno::shared_boundary_cache();

  const double p0 = zeno::evaluate_statistic(
      rec, ops, {zeno::StatisticKind::POPULATION, 0}, cache);
  CHECK(p0 == doctest::Approx(std::real(rec.rho_s(0, 0))));
  const double p1 = zeno::evaluate_statistic(
      rec, ops, {zeno::StatisticKind::POPULATION, 1}, cache);
  CHECK(p1 == doctest::Approx(std::real(rec.rho_s(1, 1))));

  const double tr = zeno::evaluate_statistic(
      rec, ops, {zeno::StatisticKind::TRACE_SYM, 0}, cache);
  CHECK(tr == doctest::Approx(rec.trace_sym));

  const double fq = zeno::evaluate_statistic(
      rec, ops, {zeno::StatisticKind::FISHER_INFO, 0}, cache);
  const auto embedded = zeno::embed_reconstruction(rec, zeno::DickeBasis{atoms});
  CHECK(fq == doctest::Approx(zeno::fisher_lower_bound(embedded).fisher_info)
                  .epsilon(1e-9));

  const double depth = zeno::evaluate_statistic(
      rec, ops, {zeno::StatisticKind::ENTANGLEMENT_DEPTH, 0}, cache);
  CHECK(depth == double(zeno::entanglement_depth(p0, p1, atoms, cache)));

  const double ts = zeno::evaluate_statistic(
      rec, ops, {zeno::StatisticKind::TRANSVERSE_SPIN, 0}, cache);
  CHECK(ts == doctest::Approx(zeno::transverse_spin_length(embedded, ops))
                  .epsilon(1e-9));
}

TEST_CASE("bootstrap is deterministic and scheduling independent") {
  const int atoms = 36;
  const auto& ops = zeno::shared_spin_operators(atoms);
  const auto data = standard_dataset(ops, 5);
  zeno::ReconstructionConfig rc;
  zeno::StatisticSpec stat{zeno::StatisticKind::TRACE_SYM, 0};

  zeno::BootstrapConfig ba;
  ba.replicas = 60;
  ba.seed = 31;
  const auto r1 = zeno::bootstrap(data, rc, stat, ba);
  const auto r2 = zeno::bootstrap(data, rc, stat, ba);
  CHECK(identical_results(r1, r2));

  // Worker count must not change the numbers, only the schedule.
  zeno::BootstrapConfig bw = ba;
  bw.workers = 3;
  const auto r3 = zeno::bootstrap(data, rc, stat, bw);
  CHECK(identical_results(r1, r3));

  // A different seed must actually change the replica draws.
  zeno::BootstrapConfig bd = ba;
  bd.seed = 32;
  const auto r4 = zeno::bootstrap(data, rc, stat, bd);
  CHECK_FALSE(identical_results(r1, r4));
}

TEST_CASE("bootstrap intervals are ordered, nested, and anchored") {
  const int atoms = 36;
  const auto& ops = zeno::shared_spin_operators(atoms);
  const auto data = standard_dataset(ops, 9);
  zeno::ReconstructionConfig rc;
  zeno::StatisticSpec stat{zeno::StatisticKind::POPULATION, 1};
  zeno::BootstrapConfig bc;
  bc.replicas = 80;
  bc.seed = 12;
  const auto res = zeno::bootstrap(data, rc, stat, bc);

  REQUIRE(res.intervals.count(0.68) == 1);
  REQUIRE(res.intervals.count(0.95) == 1);
  const auto& i68 = res.intervals.at(0.68);
  const auto& i95 = res.intervals.at(0.95);
  CHECK(i68.lower <= i68.upper);
  CHECK(i95.lower <= i68.lower);
  CHECK(i68.upper <= i95.upper);

  // Samples are sorted and the intervals sit inside their range.
  REQUIRE(res.samples.size() + std::size_t(res.dropped_replicas) == 80);
  for (std::size_t i = 1; i < res.samples.size(); ++i)
    CHECK(res.samples[i] >= res.samples[i - 1]);
  CHECK(i95.lower >= res.samples.front() - 1e-12);
  CHECK(i95.upper <= res.samples.back() + 1e-12);
  CHECK(res.dropped_replicas == 0);

  // The replica spread should track the point estimate.
  CHECK(res.point_estimate > i95.lower - 0.1);
  CHECK(res.point_estimate < i95.upper + 0.1);
  CHECK(res.standard_deviation > 0.0);
}

TEST_CASE("more data narrows the interval") {
  const int atoms = 36;
  const auto& ops = zeno::shared_spin_operators(atoms);
  zeno::ReconstructionConfig rc;
  zeno::StatisticSpec stat{zeno::StatisticKind::POPULATION, 1};
  zeno::BootstrapConfig bc;
  bc.replicas = 50;
  bc.seed = 77;

  const auto narrow = zeno::bootstrap(standard_dataset(ops, 3, 800), rc, stat, bc);
  const auto wide = zeno::bootstrap(standard_dataset(ops, 3, 50), rc, stat, bc);
  const auto& wn = narrow.intervals.at(0.95);
  const auto& ww = wide.intervals.at(0.95);
  CHECK(wn.upper - wn.lower < ww.upper - ww.lower);
}

TEST_CASE("bootstrap covers a known truth at the nominal rate") {
  // TRACE_SYM of the truth is 0.88 (12% of the weight sits outside the
  // reconstruction window at n = 20).  20 independent datasets, 95% interval:
  // expect ≥ 17 hits.
  const int atoms = 36;
  const auto& ops = zeno::shared_spin_operators(atoms);
  const auto truth = mixed_truth(ops);
  double true_trace = 0.0;
  for (int n = 0; n <= 4; ++n) true_trace += std::real(truth.matrix(n, n));

  zeno::ReconstructionConfig rc;
  zeno::StatisticSpec stat{zeno::StatisticKind::TRACE_SYM, 0};
  int hits = 0;
  for (int trial = 0; trial < 20; ++trial) {
    // 100 shots per angle: below that the fit's small-sample bias pushes the
    // percentile interval off the truth more often than the nominal 5%.
    const auto data = standard_dataset(ops, 100 + std::uint64_t(trial), 100);
    zeno::BootstrapConfig bc;
    bc.replicas = 60;
    bc.seed = 7000 + std::uint64_t(trial);
    const auto res = zeno::bootstrap(data, rc, stat, bc);
    const auto& iv = res.intervals.at(0.95);
    if (true_trace >= iv.lower && true_trace <= iv.upper) ++hits;
  }
  CHECK(hits >= 17);
}

TEST_CASE("model resampling mode stays close to frequency resampling") {
  const int atoms = 36;
  const auto& ops = zeno::shared_spin_operators(atoms);
  const auto data = standard_dataset(ops, 23, 200);
  zeno::ReconstructionConfig rc;
  zeno::StatisticSpec stat{zeno::StatisticKind::POPULATION, 1};
  zeno::BootstrapConfig bc;
  bc.replicas = 40;
  bc.seed = 5;
  const auto freq = zeno::bootstrap(data, rc, stat, bc);
  bc.resample_from_model = true;
  const auto model = zeno::bootstrap(data, rc, stat, bc);
  CHECK(freq.point_estimate == model.point_estimate);  // same dataset fit
  CHECK(std::abs(freq.intervals.at(0.95).lower -
                 model.intervals.at(0.95).lower) < 0.15);
}

TEST_CASE("depth statistic produces integer samples and a sane summary") {
  const int atoms = 36;
  const auto& ops = zeno::shared_spin_operators(atoms);
  const auto data = standard_dataset(ops, 41, 300);
  zeno::ReconstructionConfig rc;
  zeno::StatisticSpec stat{zeno::StatisticKind::ENTANGLEMENT_DEPTH, 0};
  zeno::BootstrapConfig bc;
  bc.replicas = 30;
  bc.seed = 9;
  auto& cache = zeno::shared_boundary_cache();
  const auto res = zeno::bootstrap(data, rc, stat, bc, &cache);
  for (double s : res.samples) {
    CHECK(s == std::floor(s));
    CHECK(s >= 1.0);
    CHECK(s <= double(atoms));
  }
  const std::string line =
      zeno::format_integer_estimate(res.point_estimate, res.intervals.at(0.68));
  CHECK(line.find('(') != std::string::npos);
}

TEST_CASE("bootstrap rejects invalid configurations") {
  const int atoms = 36;
  const auto& ops = zeno::shared_spin_operators(atoms);
  const auto data = standard_dataset(ops, 2);
  zeno::ReconstructionConfig rc;
  zeno::StatisticSpec stat{zeno::StatisticKind::TRACE_SYM, 0};

  zeno::BootstrapConfig bc;
  bc.replicas = 1;
  CHECK_THROWS_AS(zeno::bootstrap(data, rc, stat, bc), std::invalid_argument);

  bc.replicas = 10;
  bc.confidence_levels = {1.5};
  CHECK_THROWS_AS(zeno::bootstrap(data, rc, stat, bc), std::invalid_argument);

  bc.confidence_levels = {0.68};
  bc.workers = 0;
  CHECK_THROWS_AS(zeno::bootstrap(data, rc, stat, bc), std::invalid_argument);
}
