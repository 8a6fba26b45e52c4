#include "zeno/tomography.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "zeno/rng.hpp"

namespace zeno {

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

constexpr double kProbFloor = 1e-9;

double clamp_prob(double p) {
  if (p < kProbFloor) return kProbFloor;
  if (p > 1.0 - kProbFloor) return 1.0 - kProbFloor;
  return p;
}

void check_eps(double e, const char* name) {
  if (!(e >= 0.0) || !(e < 0.5))
    fail(std::string("detection error ") + name + " must lie in [0, 0.5)");
}

}  // namespace

TomographyGrid default_tomography_grid() {
  TomographyGrid g;
  const double lim = 0.26 * std::numbers::pi;
  for (int i = 0; i < 7; ++i) {
    const double v = -lim + 2.0 * lim * i / 6.0;
    g.thetas.push_back(v);
    g.phis.push_back(v);
  }
  return g;
}

DetectionErrorModel constant_errors(double eps01, double eps10) {
  check_eps(eps01, "eps01");
  check_eps(eps10, "eps10");
  DetectionErrorModel m;
  m.eps01 = {eps01};
  m.eps10 = {eps10};
  return m;
}

void validate_errors(const DetectionErrorModel& errors,
                     const TomographyGrid& grid) {
  const std::size_t p = std::size_t(grid.point_count());
  if (errors.eps01.size() != 1 && errors.eps01.size() != p)
    fail("errors: eps01 table must have 1 or point_count entries");
  if (errors.eps10.size() != 1 && errors.eps10.size() != p)
    fail("errors: eps10 table must have 1 or point_count entries");
  for (double e : errors.eps01) check_eps(e, "eps01");
  for (double e : errors.eps10) check_eps(e, "eps10");
}

void validate_dataset(const TomographyDataset& dataset) {
  if (dataset.atom_count < 1) fail("dataset: atom_count >= 1");
  if (dataset.points.empty()) fail("dataset: no grid points");
  for (const TomographyPoint& pt : dataset.points) {
    if (pt.shots < 1) fail("dataset: shots >= 1 per point");
    if (pt.high_counts < 0 || pt.high_counts > pt.shots)
      fail("dataset: high_counts must lie in [0, shots]");
    check_eps(pt.eps01, "eps01");
    check_eps(pt.eps10, "eps10");
    if (!std::isfinite(pt.theta) || !std::isfinite(pt.phi))
      fail("dataset: non-finite angle");
  }
}

double forward_probability(const DickeState& state,
                           const SpinOperatorSet& ops, double theta,
                           double phi, double eps01, double eps10) {
  check_eps(eps01, "eps01");
  check_eps(eps10, "eps10");
  const double p0 = p_zero(state, ops, RotationSpec{theta, phi});
  return (1.0 - eps10) * p0 + eps01 * (1.0 - p0);
}

TomographyDataset synthesize_dataset(const DickeState& state,
                                     const SpinOperatorSet& ops,
                                     const TomographyGrid& grid, int shots,
                                     const DetectionErrorModel& errors,
                                     std::uint64_t seed) {
  if (shots < 1) fail("synthesize_dataset: shots >= 1");
  validate_errors(errors, grid);
  std::mt19937_64 eng =
      rng::make_engine(rng::derive_seed(seed, 0x746f6d6fULL));
  TomographyDataset ds;
  ds.atom_count = state.basis.atom_count;
  ds.seed = seed;
  for (int k = 0; k < grid.point_count(); ++k) {
    TomographyPoint pt;
    pt.theta = grid.theta_at(k);
    pt.phi = grid.phi_at(k);
    pt.shots = shots;
    pt.eps01 = errors.eps01_at(k);
    pt.eps10 = errors.eps10_at(k);
    const double p = forward_probability(state, ops, pt.theta, pt.phi,
                                         pt.eps01, pt.eps10);
    pt.high_counts = rng::draw_binomial(eng, shots, p);
    ds.points.push_back(pt);
  }
  return ds;
}

std::vector<PovmPair> povm_elements(const TomographyGrid& grid,
                                    const DetectionErrorModel& errors,
                                    const SpinOperatorSet& ops, int n_max) {
  validate_errors(errors, grid);
  if (n_max < 1 || n_max > ops.basis.atom_count)
    fail("povm_elements: 1 <= n_max <= N");
  const int d = n_max + 1;
  std::vector<PovmPair> out;
  for (int k = 0; k < grid.point_count(); ++k) {
    const std::vector<cplx> c = rotated_ground(
        ops, RotationSpec{grid.theta_at(k), grid.phi_at(k)});
    const double e01 = errors.eps01_at(k);
    const double kappa = 1.0 - e01 - errors.eps10_at(k);
    PovmPair pair{CMat(d, d), CMat(d, d)};
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j)
        pair.high(i, j) = kappa * c[i] * std::conj(c[j]);
      pair.high(i, i) += e01;
    }
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) pair.low(i, j) = -pair.high(i, j);
      pair.low(i, i) += 1.0;
    }
    out.push_back(std::move(pair));
  }
  return out;
}

namespace {

// Reconstruction-space view of one measured point.  On the sink-augmented
// space every E_high is ε₀₁·1 + κ·|c⟩⟨c| with the truncated rotated-ground
// column c (zero on the sink), so probabilities and the R operator need only
// rank-1 updates.
struct MeasuredPoint {
  std::vector<cplx> c;       // length d (truncated + sink)
  std::vector<cplx> c_conj;  // conj(c), the ⟨c| row of |c⟩⟨c|
  double eps01 = 0.0;
  double kappa = 0.0;
  double n_high = 0.0;
  double n_low = 0.0;
};

std::vector<MeasuredPoint> measured_points(const TomographyDataset& ds,
                                           const SpinOperatorSet& ops,
                                           int n_max) {
  std::vector<MeasuredPoint> pts;
  const int d = n_max + 2;
  for (const TomographyPoint& pt : ds.points) {
    MeasuredPoint m;
    const std::vector<cplx> full =
        rotated_ground(ops, RotationSpec{pt.theta, pt.phi});
    m.c.assign(std::size_t(d), 0.0);
    for (int i = 0; i <= n_max; ++i) m.c[i] = full[i];
    m.c_conj.resize(m.c.size());
    for (std::size_t i = 0; i < m.c.size(); ++i)
      m.c_conj[i] = std::conj(m.c[i]);
    m.eps01 = pt.eps01;
    m.kappa = 1.0 - pt.eps01 - pt.eps10;
    m.n_high = pt.high_counts;
    m.n_low = pt.shots - pt.high_counts;
    pts.push_back(std::move(m));
  }
  return pts;
}

// ⟨c|ρ|c⟩ for Hermitian ρ.
double quad_form(const CMat& rho, const std::vector<cplx>& c) {
  const int d = rho.rows();
  cplx acc = 0.0;
  for (int i = 0; i < d; ++i) {
    cplx row = 0.0;
    const cplx* r = rho.row(i);
    for (int j = 0; j < d; ++j) row += r[j] * c[j];
    acc += std::conj(c[i]) * row;
  }
  return acc.real();
}

}  // namespace

Reconstruction mle_reconstruct(const TomographyDataset& dataset,
                               const ReconstructionConfig& config,
                               const SpinOperatorSet& ops) {
  validate_dataset(dataset);
  if (dataset.atom_count != ops.basis.atom_count)
    fail("mle_reconstruct: dataset/operator atom_count mismatch");
  if (config.n_max < 1 || config.n_max > dataset.atom_count)
    fail("mle_reconstruct: 1 <= n_max <= N");
  if (config.dilution <= 0.0 || config.dilution > 1.0)
    fail("mle_reconstruct: dilution in (0, 1]");
  if (config.max_iterations < 1) fail("mle_reconstruct: max_iterations >= 1");

  const int d = config.n_max + 2;  // truncated block + sink
  const std::vector<MeasuredPoint> pts =
      measured_points(dataset, ops, config.n_max);

  CMat rho(d, d);
  for (int i = 0; i < d; ++i) rho(i, i) = 1.0 / d;

  CMat r_op(d, d), work(d, d), next(d, d);
  ReconstructionDiagnostics diag;
  double ll_prev = 0.0;
  int quiet_iters = 0;
  const auto& kop = kern::ops();

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    // Probabilities, likelihood and the R operator in one pass.
    r_op.set_zero();
    double alpha = 0.0;  // coefficient of the identity in R
    double ll = 0.0;
    for (const MeasuredPoint& m : pts) {
      const double q = quad_form(rho, m.c);
      const double p = clamp_prob(m.eps01 + m.kappa * q);
      ll += m.n_high * std::log(p) + m.n_low * std::log1p(-p);
      const double w_high = m.n_high / p;
      const double w_low = m.n_low / (1.0 - p);
      alpha += (w_high - w_low) * m.eps01 + w_low;
      const double lam = (w_high - w_low) * m.kappa;
      if (lam != 0.0)
        for (int i = 0; i < d; ++i)
          kop.axpy(std::size_t(d), lam * m.c[i], m.c_conj.data(),
                   r_op.row(i));
    }
    for (int i = 0; i < d; ++i) r_op(i, i) += alpha;

    diag.log_likelihood_history.push_back(ll);
    diag.iterations = iter + 1;
    if (iter > 0) {
      const double rel =
          std::abs(ll - ll_prev) / std::max(std::abs(ll), 1.0);
      quiet_iters = rel < config.likelihood_tolerance ? quiet_iters + 1 : 0;
      if (quiet_iters >= 10) {
        diag.converged = true;
        break;
      }
    }
    ll_prev = ll;

    // ρ ← (1-α)ρ + α·RρR / tr(RρR)
    kop.gemm(d, d, d, r_op.data(), rho.data(), work.data());
    kop.gemm(d, d, d, work.data(), r_op.data(), next.data());
    const double tr = trace(next).real();
    if (!(tr > 0.0) || !std::isfinite(tr)) break;  // reported as unconverged
    const double a = config.dilution;
    kop.axpby(rho.size(), a / tr, next.data(), 1.0 - a, rho.data(),
              rho.data());
    hermitize(rho);
  }

  diag.final_log_likelihood = diag.log_likelihood_history.empty()
                                  ? 0.0
                                  : diag.log_likelihood_history.back();

  Reconstruction rec;
  rec.n_max = config.n_max;
  rec.rho_s = CMat(config.n_max + 1, config.n_max + 1);
  for (int i = 0; i <= config.n_max; ++i)
    for (int j = 0; j <= config.n_max; ++j) rec.rho_s(i, j) = rho(i, j);
  rec.trace_sym = trace(rec.rho_s).real();
  rec.diagnostics = std::move(diag);
  return rec;
}

double log_likelihood(const CMat& rho_s, const TomographyDataset& dataset,
                      const SpinOperatorSet& ops) {
  validate_dataset(dataset);
  if (rho_s.rows() != rho_s.cols() ||
      rho_s.rows() > ops.basis.dimension())
    fail("log_likelihood: state must live on a truncated Dicke basis");
  const int n_max = rho_s.rows() - 1;
  const std::vector<MeasuredPoint> pts =
      measured_points(dataset, ops, n_max);
  double ll = 0.0;
  for (const MeasuredPoint& m : pts) {
    std::vector<cplx> c(m.c.begin(), m.c.begin() + rho_s.rows());
    const double q = quad_form(rho_s, c);
    // Any trace missing from rho_s sits in the sink, where E_high acts as
    // ε₀₁·1 — so the ε₀₁ term covers the full unit of probability.
    const double p = clamp_prob(m.eps01 + m.kappa * q);
    ll += m.n_high * std::log(p) + m.n_low * std::log1p(-p);
  }
  return ll;
}

DickeState embed_reconstruction(const Reconstruction& rec,
                                const DickeBasis& basis) {
  if (rec.n_max >= basis.dimension())
    fail("embed_reconstruction: n_max exceeds basis");
  DickeState out{basis, CMat(basis.dimension(), basis.dimension())};
  for (int i = 0; i <= rec.n_max; ++i)
    for (int j = 0; j <= rec.n_max; ++j) out.matrix(i, j) = rec.rho_s(i, j);
  return out;
}

std::string dataset_to_csv(const TomographyDataset& dataset) {
  std::ostringstream os;
  os.precision(17);
  os << "theta_rad,phi_rad,shots,high_counts,eps01,eps10\n";
  for (const TomographyPoint& pt : dataset.points)
    os << pt.theta << ',' << pt.phi << ',' << pt.shots << ','
       << pt.high_counts << ',' << pt.eps01 << ',' << pt.eps10 << '\n';
  return os.str();
}

TomographyDataset dataset_from_csv(const std::string& text, int atom_count) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line))
    fail("dataset_from_csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "theta_rad,phi_rad,shots,high_counts,eps01,eps10")
    fail("dataset_from_csv: unexpected header: " + line);
  TomographyDataset ds;
  ds.atom_count = atom_count;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    TomographyPoint pt;
    char c1, c2, c3, c4, c5;
    if (!(row >> pt.theta >> c1 >> pt.phi >> c2 >> pt.shots >> c3 >>
          pt.high_counts >> c4 >> pt.eps01 >> c5 >> pt.eps10) ||
        c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',' || c5 != ',')
      fail("dataset_from_csv: malformed row at line " +
           std::to_string(lineno));
    ds.points.push_back(pt);
  }
  validate_dataset(ds);
  return ds;
}

}  // namespace zeno
