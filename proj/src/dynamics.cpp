#include "zeno/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace zeno {

namespace {

constexpr double kPi = std::numbers::pi;

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

// Right-hand side of the master equation, exploiting the structure of the
// generator: J_x is tridiagonal, the measurement term touches only row/column
// 0, and the loss term is an elementwise damping.  For Hermitian ρ,
// [J_x, ρ] = B - B† with B = J_x·ρ, so one stencil pass suffices.
struct MasterEquation {
  int d = 0;
  double omega_signed = 0.0;  // drive_sign · Ω
  double rm = 0.0;
  double recycle = 1.0;  // 1 = unconditional; 1-η for no-click conditioning
  const std::vector<double>* gamma = nullptr;  // nullptr for loss NONE
  std::vector<double> half_ladder;             // 0.5·⟨n+1|J₊|n⟩

  explicit MasterEquation(const ZenoConfig& cfg, double recycle_fraction,
                          const std::vector<double>* gamma_table)
      : d(cfg.basis.dimension()),
        omega_signed(cfg.drive_sign * cfg.rabi_frequency),
        rm(cfg.measurement_rate),
        recycle(recycle_fraction),
        gamma(gamma_table) {
    const std::vector<double> c = ladder_coefficients(cfg.basis.atom_count);
    half_ladder.resize(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) half_ladder[i] = 0.5 * c[i];
  }

  void operator()(const CMat& rho, CMat& out, CMat& tmp) const {
    // tmp = J_x · ρ (row stencil)
    tmp.set_zero();
    const auto& kop = kern::ops();
    for (int i = 0; i < d; ++i) {
      if (i > 0)
        kop.axpy(std::size_t(d), half_ladder[i - 1], rho.row(i - 1),
                 tmp.row(i));
      if (i + 1 < d)
        kop.axpy(std::size_t(d), half_ladder[i], rho.row(i + 1), tmp.row(i));
    }
    // out = -i·Ω_s·(tmp - tmp†)
    const cplx miw(0.0, -omega_signed);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        out(i, j) = miw * (tmp(i, j) - std::conj(tmp(j, i)));
    if (rm > 0.0) {
      // -½ r_m (P₀ρ + ρP₀) + recycle · r_m ρ₀₀ |0⟩⟨0|
      kop.axpy(std::size_t(d), -0.5 * rm, rho.row(0), out.row(0));
      for (int i = 0; i < d; ++i) out(i, 0) -= 0.5 * rm * rho(i, 0);
      out(0, 0) += recycle * rm * rho(0, 0);
    }
    if (gamma != nullptr) {
      const std::vector<double>& g = *gamma;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          out(i, j) -= (g[i] + g[j]) * rho(i, j);
    }
  }
};

struct Rk4Buffers {
  CMat k1, k2, k3, k4, stage, tmp;
  explicit Rk4Buffers(int d)
      : k1(d, d), k2(d, d), k3(d, d), k4(d, d), stage(d, d), tmp(d, d) {}
};

// Advances (rho, click) over [0, span] with n equal RK4 steps.
// detect_rate = η·r_m accumulates the detected-photon flux off ρ₀₀.
void rk4_advance(CMat& rho, double& click, double span, int n_steps,
                 const MasterEquation& eq, Rk4Buffers& b, double detect_rate) {
  const double h = span / n_steps;
  const std::size_t sz = rho.size();
  const auto& kop = kern::ops();
  for (int s = 0; s < n_steps; ++s) {
    eq(rho, b.k1, b.tmp);
    const double c1 = detect_rate * rho(0, 0).real();
    kop.axpby(sz, 0.5 * h, b.k1.data(), 1.0, rho.data(), b.stage.data());
    eq(b.stage, b.k2, b.tmp);
    const double c2 = detect_rate * b.stage(0, 0).real();
    kop.axpby(sz, 0.5 * h, b.k2.data(), 1.0, rho.data(), b.stage.data());
    eq(b.stage, b.k3, b.tmp);
    const double c3 = detect_rate * b.stage(0, 0).real();
    kop.axpby(sz, h, b.k3.data(), 1.0, rho.data(), b.stage.data());
    eq(b.stage, b.k4, b.tmp);
    const double c4 = detect_rate * b.stage(0, 0).real();
    kop.rk4_combine(sz, h, rho.data(), b.k1.data(), b.k2.data(), b.k3.data(),
                    b.k4.data());
    click += h / 6.0 * (c1 + 2.0 * (c2 + c3) + c4);
  }
}

int steps_for(double span, double step_cap) {
  return std::max(1, int(std::ceil(span / step_cap - 1e-12)));
}

void check_model_loss(const ZenoConfig& cfg, DynamicsModel model) {
  switch (model) {
    case DynamicsModel::S1:
      if (cfg.loss.kind != LossKind::NONE)
        fail("evolve: model S1 requires loss NONE");
      break;
    case DynamicsModel::S3:
      if (cfg.loss.kind == LossKind::NONE)
        fail("evolve: model S3 requires a loss model");
      break;
    case DynamicsModel::IDEAL:
      if (cfg.loss.kind != LossKind::NONE)
        fail("evolve: model IDEAL does not take a loss model");
      if (cfg.measurement_rate <= 0.0)
        fail("evolve: model IDEAL with r_m = 0 is ambiguous (that limit is "
             "plain Rabi dynamics); set r_m > 0 or use model S1");
      break;
  }
}

[[noreturn]] void abort_nonfinite(double t) {
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "evolve: non-finite state encountered at t = %.6e s", t);
  throw std::runtime_error(buf);
}

DickeState snapshot(const DickeBasis& basis, const CMat& rho) {
  DickeState s{basis, rho};
  hermitize(s.matrix);
  return s;
}

EvolutionRecord integrate_grid(const DickeState& initial,
                               const ZenoConfig& cfg, DynamicsModel model,
                               bool conditional) {
  validate_config(cfg);
  validate_state(initial, "evolve");
  check_model_loss(cfg, model);

  std::vector<double> gamma;
  const std::vector<double>* gptr = nullptr;
  if (cfg.loss.kind != LossKind::NONE) {
    gamma =
        loss_rates(cfg.loss, cfg.basis.atom_count, cfg.measurement_rate);
    gptr = &gamma;
  }
  const double eta = cfg.detection_efficiency;
  const double recycle = conditional ? (1.0 - eta) : 1.0;
  const double detect_rate =
      conditional ? eta * cfg.measurement_rate : 0.0;

  const MasterEquation eq(cfg, recycle, gptr);
  Rk4Buffers buffers(cfg.basis.dimension());

  EvolutionRecord rec;
  CMat rho = initial.matrix;
  double click = 0.0;
  double t_prev = 0.0;
  for (double t : cfg.time_grid) {
    if (t > t_prev) {
      const double span = t - t_prev;
      rk4_advance(rho, click, span, steps_for(span, cfg.integrator_step), eq,
                  buffers, detect_rate);
      t_prev = t;
    }
    const double tr = trace(rho).real();
    if (!std::isfinite(tr)) abort_nonfinite(t);
    rec.times.push_back(t);
    if (conditional) {
      rec.raw_states.push_back(snapshot(cfg.basis, rho));
      CMat renorm = rho;
      if (tr > 1e-300) {
        const double inv = 1.0 / tr;
        for (std::size_t i = 0; i < renorm.size(); ++i)
          renorm.data()[i] *= inv;
      }
      rec.states.push_back(snapshot(cfg.basis, renorm));
      rec.click_probability.push_back(click);
    } else {
      rec.states.push_back(snapshot(cfg.basis, rho));
    }
  }
  return rec;
}

CMat zeno_hamiltonian(const ZenoConfig& cfg) {
  const std::vector<double> c = ladder_coefficients(cfg.basis.atom_count);
  const int d = cfg.basis.dimension();
  CMat h(d, d);
  const double w = cfg.drive_sign * cfg.rabi_frequency;
  for (int n = 0; n + 1 < d; ++n) {
    if (n == 0) continue;  // Π_Z removes row/column 0
    h(n + 1, n) = 0.5 * w * c[n];
    h(n, n + 1) = 0.5 * w * c[n];
  }
  return h;
}

}  // namespace

std::vector<double> loss_rates(const LossModel& loss, int atom_count,
                               double measurement_rate) {
  const int d = atom_count + 1;
  std::vector<double> g(d, 0.0);
  switch (loss.kind) {
    case LossKind::NONE:
      break;
    case LossKind::TABLE:
      if (int(loss.gamma_table.size()) != d)
        fail("loss_rates: gamma_table must have length N+1");
      if (loss.gamma_table[0] != 0.0)
        fail("loss_rates: gamma_0 must be 0 (no excited atom, no emission)");
      for (int n = 0; n < d; ++n) {
        if (loss.gamma_table[n] < 0.0)
          fail("loss_rates: negative rate in gamma_table");
        g[n] = loss.gamma_table[n];
      }
      break;
    case LossKind::IDEAL_CAVITY:
      if (loss.cooperativity <= 0.0)
        fail("loss_rates: IDEAL_CAVITY needs cooperativity > 0");
      if (loss.atomic_halfwidth < 0.0)
        fail("loss_rates: atomic_halfwidth must be >= 0");
      for (int n = 1; n < d; ++n)
        g[n] = measurement_rate / (4.0 * n * loss.cooperativity);
      break;
  }
  return g;
}

double max_integrator_step(double rabi_frequency, double measurement_rate) {
  const double drive_cap = 0.01 / rabi_frequency;
  if (measurement_rate > 0.0)
    return std::min(drive_cap, 0.1 / measurement_rate);
  return drive_cap;
}

void validate_config(const ZenoConfig& config) {
  if (config.basis.atom_count < 1) fail("config: atom_count >= 1");
  if (!(config.rabi_frequency > 0.0)) fail("config: rabi_frequency > 0");
  if (config.measurement_rate < 0.0) fail("config: measurement_rate >= 0");
  if (std::abs(config.pi_pulse_time * config.rabi_frequency - kPi) > 1e-12)
    fail("config: pi_pulse_time must equal pi/rabi_frequency");
  if (config.time_grid.empty()) fail("config: time_grid must be non-empty");
  if (config.time_grid.front() != 0.0) fail("config: time_grid starts at 0");
  for (std::size_t i = 1; i < config.time_grid.size(); ++i)
    if (!(config.time_grid[i] > config.time_grid[i - 1]))
      fail("config: time_grid must be strictly increasing");
  const double cap =
      max_integrator_step(config.rabi_frequency, config.measurement_rate);
  if (!(config.integrator_step > 0.0))
    fail("config: integrator_step > 0");
  if (config.integrator_step > cap * (1.0 + 1e-12))
    fail("config: integrator_step exceeds min(0.01/Omega, 0.1/r_m)");
  if (config.detection_efficiency < 0.0 || config.detection_efficiency > 1.0)
    fail("config: detection_efficiency in [0, 1]");
  if (std::abs(std::abs(config.drive_sign) - 1.0) > 1e-12)
    fail("config: drive_sign must be +1 or -1");
}

CMat lindblad_rhs(const DickeState& state, const ZenoConfig& config) {
  if (config.loss.kind != LossKind::NONE)
    fail("lindblad_rhs: loss model must be NONE (use lindblad_with_loss_rhs)");
  validate_state(state, "lindblad_rhs");
  const int d = config.basis.dimension();
  const MasterEquation eq(config, 1.0, nullptr);
  CMat out(d, d), tmp(d, d);
  eq(state.matrix, out, tmp);
  return out;
}

CMat lindblad_with_loss_rhs(const DickeState& state,
                            const ZenoConfig& config) {
  if (config.loss.kind == LossKind::NONE)
    fail("lindblad_with_loss_rhs: needs loss TABLE or IDEAL_CAVITY");
  validate_state(state, "lindblad_with_loss_rhs");
  const std::vector<double> gamma =
      loss_rates(config.loss, config.basis.atom_count,
                 config.measurement_rate);
  const int d = config.basis.dimension();
  const MasterEquation eq(config, 1.0, &gamma);
  CMat out(d, d), tmp(d, d);
  eq(state.matrix, out, tmp);
  return out;
}

DickeState ideal_qzd_step(const DickeState& state, const ZenoConfig& config,
                          double duration) {
  validate_state(state, "ideal_qzd_step");
  if (state.matrix(0, 0).real() >= 1e-9)
    fail("ideal_qzd_step: initial state has support on |0_N> (rho_00 >= "
         "1e-9); Zeno confinement assumes the blocked state is empty");
  if (duration < 0.0) fail("ideal_qzd_step: duration >= 0");
  const CMat u = unitary_exp(zeno_hamiltonian(config), duration);
  DickeState out{state.basis, matmul(matmul(u, state.matrix), dagger(u))};
  hermitize(out.matrix);
  return out;
}

EvolutionRecord evolve(const DickeState& initial, const ZenoConfig& config,
                       DynamicsModel model) {
  if (model != DynamicsModel::IDEAL)
    return integrate_grid(initial, config, model, false);

  validate_config(config);
  validate_state(initial, "evolve");
  check_model_loss(config, model);
  if (initial.matrix(0, 0).real() >= 1e-9)
    fail("evolve: IDEAL model requires rho_00 < 1e-9 initially");

  const EighResult hz = eigh(zeno_hamiltonian(config));
  EvolutionRecord rec;
  CMat rho = initial.matrix;
  double t_prev = 0.0;
  for (double t : config.time_grid) {
    if (t > t_prev) {
      const double dt = t - t_prev;
      const CMat u = spectral_apply(
          hz, [dt](double w) { return std::polar(1.0, -dt * w); });
      rho = matmul(matmul(u, rho), dagger(u));
      hermitize(rho);
      t_prev = t;
    }
    if (!std::isfinite(trace(rho).real())) abort_nonfinite(t);
    rec.times.push_back(t);
    rec.states.push_back(snapshot(config.basis, rho));
  }
  return rec;
}

EvolutionRecord conditional_no_click_evolve(const DickeState& initial,
                                            const ZenoConfig& config) {
  const DynamicsModel model = config.loss.kind == LossKind::NONE
                                  ? DynamicsModel::S1
                                  : DynamicsModel::S3;
  return integrate_grid(initial, config, model, true);
}

std::vector<TrajectorySegment> trajectory_sequence(
    const TrajectorySpec& spec, const SpinOperatorSet& ops,
    const ZenoConfig& config) {
  if (spec.t_over_T < 0.0) fail("trajectory: t_over_T >= 0");
  auto x_pulse = [&](double angle) {
    return spectral_apply(ops.jx_eig, [angle](double w) {
      return std::polar(1.0, -angle * w);
    });
  };
  auto y_pulse = [&](double angle) {
    return spectral_apply(ops.jy_eig, [angle](double w) {
      return std::polar(1.0, -angle * w);
    });
  };
  std::vector<TrajectorySegment> segs;
  const double duration = spec.t_over_T * config.pi_pulse_time;
  switch (spec.kind) {
    case TrajectoryKind::I:
      segs.push_back({TrajectorySegment::Kind::ROTATION, x_pulse(2.0 * kPi),
                      0.0, 0.0, false});
      segs.push_back({TrajectorySegment::Kind::ROTATION, x_pulse(-kPi), 0.0,
                      0.0, false});
      segs.push_back(
          {TrajectorySegment::Kind::DRIVE, CMat(), duration, -1.0, true});
      break;
    case TrajectoryKind::II:
      segs.push_back({TrajectorySegment::Kind::ROTATION,
                      y_pulse(spec.tilt_angle), 0.0, 0.0, false});
      segs.push_back({TrajectorySegment::Kind::ROTATION, x_pulse(kPi), 0.0,
                      0.0, false});
      segs.push_back(
          {TrajectorySegment::Kind::DRIVE, CMat(), duration, +1.0, true});
      break;
    default:
      fail("trajectory: unknown kind");
  }
  return segs;
}

double measurement_rate_from_flux(double photon_flux,
                                  double empty_cavity_transmission) {
  if (photon_flux < 0.0)
    fail("measurement_rate_from_flux: photon_flux >= 0");
  if (empty_cavity_transmission < 0.0 || empty_cavity_transmission > 1.0)
    fail("measurement_rate_from_flux: transmission in [0, 1]");
  return 2.0 * photon_flux * std::sqrt(empty_cavity_transmission);
}

EvolutionRecord run_trajectory_grid(const SpinOperatorSet& ops,
                                    const ZenoConfig& config,
                                    const TrajectorySpec& spec,
                                    DynamicsModel model, bool conditional) {
  TrajectorySpec full = spec;
  full.t_over_T = config.time_grid.empty()
                      ? 0.0
                      : config.time_grid.back() / config.pi_pulse_time;
  const std::vector<TrajectorySegment> segs =
      trajectory_sequence(full, ops, config);

  DickeState state = named_state(ops, NamedState::ALL_ZERO);
  for (const TrajectorySegment& seg : segs) {
    if (seg.kind == TrajectorySegment::Kind::ROTATION) {
      state.matrix =
          matmul(matmul(seg.unitary, state.matrix), dagger(seg.unitary));
      hermitize(state.matrix);
    } else {
      ZenoConfig cfg = config;
      cfg.drive_sign = seg.drive_sign;
      if (!seg.measurement_on) cfg.measurement_rate = 0.0;
      if (conditional) return conditional_no_click_evolve(state, cfg);
      return evolve(state, cfg, model);
    }
  }
  // No drive segment: return the post-prelude state at t = 0.
  EvolutionRecord rec;
  rec.times.push_back(0.0);
  rec.states.push_back(state);
  return rec;
}

}  // namespace zeno
