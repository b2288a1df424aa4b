#include "swapqoc/propagator.hpp"

#include <cmath>
#include <cstring>
#include <mutex>
#include <stdexcept>

namespace swq {

namespace {
// The FFTW planner is not thread-safe; trajectories run concurrently.
std::mutex g_fftw_mutex;
}  // namespace

Stepper::Stepper(const Grid1D& grid, int particles, double dt,
                 const LatticeParams& p, const AbsorberParams& absorber)
    : grid_(grid), particles_(particles), dt_(dt), params_(p) {
  const int n = grid_.n;

  gamma_.assign(n, 0.0);
  if (absorber.enabled) {
    const double w = 0.2 * p.site_a * absorber.width_frac;
    const double strength = khz_to_natural(absorber.strength_khz);
    for (int i = 0; i < n; ++i) {
      const double x = grid_.points[i];
      const double d_hi = x - (grid_.x_max - w);
      const double d_lo = (grid_.x_min + w) - x;
      const double d = std::max({d_hi, d_lo, 0.0}) / w;
      gamma_[i] = strength * d * d;  // smooth quadratic ramp
    }
  }

  const auto k = wavenumbers(grid_);
  kf_.resize(n);
  const double pref = 0.5 * p.hbar_over_m() * dt_;
  for (int i = 0; i < n; ++i) {
    kf_[i] = std::exp(complex{0.0, -pref * k[i] * k[i]});
  }

  pf_.assign(n, complex{1.0, 0.0});
  pdiag_.assign(n, complex{1.0, 0.0});

  const std::size_t total = particles_ == 1 ? static_cast<std::size_t>(n)
                                            : static_cast<std::size_t>(n) * n;
  std::lock_guard<std::mutex> lock(g_fftw_mutex);
  buf_ = fftw_alloc_complex(total);
  if (particles_ == 1) {
    plan_fwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    plan_bwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  } else {
    plan_fwd_ = fftw_plan_dft_2d(n, n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    plan_bwd_ = fftw_plan_dft_2d(n, n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
}

Stepper::~Stepper() {
  std::lock_guard<std::mutex> lock(g_fftw_mutex);
  fftw_destroy_plan(plan_fwd_);
  fftw_destroy_plan(plan_bwd_);
  fftw_free(buf_);
}

void Stepper::set_step_controls(const ControlPoint& u) {
  const int n = grid_.n;
  const double half = 0.5 * dt_;
  for (int i = 0; i < n; ++i) {
    const double v = lattice_potential(grid_.points[i], u.beta, u.theta, u.v0,
                                       params_);
    pf_[i] = std::exp(complex{-gamma_[i] * half, -v * half});
  }
  if (particles_ == 2) {
    for (int i = 0; i < n; ++i) {
      const double g = coupling_g1d(grid_.points[i], u.beta, u.theta, u.v0,
                                    params_) / grid_.dx;
      pdiag_[i] = std::exp(complex{0.0, -g * half});
    }
  }
}

void Stepper::potential_half(cvec& amp, bool conjugated) {
  const int n = grid_.n;
  if (particles_ == 1) {
    for (int i = 0; i < n; ++i) {
      amp[i] *= conjugated ? std::conj(pf_[i]) : pf_[i];
    }
  } else {
    for (int i1 = 0; i1 < n; ++i1) {
      const complex p1 = conjugated ? std::conj(pf_[i1]) : pf_[i1];
      complex* row = amp.data() + static_cast<std::size_t>(i1) * n;
      for (int i2 = 0; i2 < n; ++i2) {
        row[i2] *= p1 * (conjugated ? std::conj(pf_[i2]) : pf_[i2]);
      }
      row[i1] *= conjugated ? std::conj(pdiag_[i1]) : pdiag_[i1];
    }
  }
}

void Stepper::kinetic_full(cvec& amp, bool conjugated) {
  const int n = grid_.n;
  const std::size_t total = amp.size();
  std::memcpy(buf_, amp.data(), total * sizeof(fftw_complex));
  fftw_execute(plan_fwd_);
  auto* b = reinterpret_cast<complex*>(buf_);
  if (particles_ == 1) {
    for (int i = 0; i < n; ++i) {
      b[i] *= conjugated ? std::conj(kf_[i]) : kf_[i];
    }
  } else {
    for (int i1 = 0; i1 < n; ++i1) {
      const complex k1 = conjugated ? std::conj(kf_[i1]) : kf_[i1];
      complex* row = b + static_cast<std::size_t>(i1) * n;
      for (int i2 = 0; i2 < n; ++i2) {
        row[i2] *= k1 * (conjugated ? std::conj(kf_[i2]) : kf_[i2]);
      }
    }
  }
  fftw_execute(plan_bwd_);
  const double scale = 1.0 / static_cast<double>(total);
  for (std::size_t i = 0; i < total; ++i) {
    amp[i] = b[i] * scale;
  }
}

void Stepper::forward(cvec& amp) {
  potential_half(amp, false);
  kinetic_full(amp, false);
  potential_half(amp, false);
}

void Stepper::adjoint(cvec& amp) {
  potential_half(amp, true);
  kinetic_full(amp, true);
  potential_half(amp, true);
}

ControlPoint step_midpoint(const ControlSet& c, std::size_t n) {
  const double b = 0.5 * (c.beta[n] + c.beta[n + 1]) * c.scaling.beta_scale;
  const double th = 0.5 * (c.theta[n] + c.theta[n + 1]) * c.scaling.theta_scale;
  const double v = 0.5 * (c.v0[n] + c.v0[n + 1]) * c.scaling.v0_scale();
  return {b, th, v};
}

namespace {

Trajectory run_split_step(const Wavefunction& psi0, const ControlSet& controls,
                          const PropagationConfig& cfg, const LatticeParams& p,
                          int particles, const StepCallback& cb) {
  if (psi0.particles != particles) {
    throw std::invalid_argument("split_step: wrong state dimensionality");
  }
  if (std::abs(controls.dt - cfg.dt) > 1e-12 * cfg.dt) {
    throw std::invalid_argument("split_step: control sampling does not match propagation dt");
  }
  Stepper stepper(psi0.grid, particles, cfg.dt, p, cfg.absorber);
  Wavefunction psi = psi0;
  Trajectory traj;
  auto record = [&](std::size_t step) {
    traj.times.push_back(static_cast<double>(step) * cfg.dt);
    traj.snapshots.push_back(psi);
    traj.norms.push_back(norm(psi));
  };
  record(0);
  const std::size_t steps = controls.steps();
  for (std::size_t n = 0; n < steps; ++n) {
    stepper.set_step_controls(step_midpoint(controls, n));
    stepper.forward(psi.amp);
    if (cb) cb(n + 1, static_cast<double>(n + 1) * cfg.dt, psi);
    if (cfg.store_stride > 0 && (n + 1) % static_cast<std::size_t>(cfg.store_stride) == 0 &&
        n + 1 != steps) {
      record(n + 1);
    }
  }
  record(steps);
  return traj;
}

}  // namespace

Trajectory split_step_1p(const Wavefunction& psi0, const ControlSet& controls,
                         const PropagationConfig& cfg, const LatticeParams& p,
                         const StepCallback& cb) {
  return run_split_step(psi0, controls, cfg, p, 1, cb);
}

Trajectory split_step_2p(const Wavefunction& psi0, const ControlSet& controls,
                         const PropagationConfig& cfg, const LatticeParams& p,
                         const StepCallback& cb) {
  return run_split_step(psi0, controls, cfg, p, 2, cb);
}

double fidelity(const Wavefunction& psi, const Wavefunction& target) {
  return std::norm(inner_product(target, psi));
}

double merge_population(const Wavefunction& psi, const EigenState& plus,
                        const EigenState& minus) {
  return std::norm(inner_product(plus.psi, psi)) +
         std::norm(inner_product(minus.psi, psi));
}

double relative_phase(const Wavefunction& psi, const EigenState& plus,
                      const EigenState& minus) {
  const complex op = inner_product(plus.psi, psi);
  const complex om = inner_product(minus.psi, psi);
  if (std::abs(op) < 1e-3 || std::abs(om) < 1e-3) {
    throw std::runtime_error("relative_phase: vanishing overlap, phase undefined");
  }
  double a = std::arg(om) - std::arg(op);
  a = std::fmod(a, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a;
}

}  // namespace swq
