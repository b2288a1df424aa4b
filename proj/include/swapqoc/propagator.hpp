#ifndef SWAPQOC_PROPAGATOR_HPP
#define SWAPQOC_PROPAGATOR_HPP

#include <fftw3.h>

#include <functional>

#include "swapqoc/eigensolver.hpp"
#include "swapqoc/grid.hpp"
#include "swapqoc/lattice.hpp"

namespace swq {

struct AbsorberParams {
  bool enabled = true;
  double width_frac = 1.0;      // fraction of the 0.2a padding
  double strength_khz = 50.0;   // Gamma
};

struct PropagationConfig {
  double dt = 1.2e-5;  // ms
  AbsorberParams absorber;
  int store_stride = 0;  // 0: keep only endpoints
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Wavefunction> snapshots;
  std::vector<double> norms;

  const Wavefunction& final_state() const { return snapshots.back(); }
};

// One Strang step V/2 - T - V/2 with the potential evaluated at fixed
// (per-step midpoint) controls. Owns the FFT workspace; one instance per
// trajectory. Also exposes the exact adjoint step for GRAPE costates.
class Stepper {
 public:
  Stepper(const Grid1D& grid, int particles, double dt, const LatticeParams& p,
          const AbsorberParams& absorber);
  ~Stepper();
  Stepper(const Stepper&) = delete;
  Stepper& operator=(const Stepper&) = delete;

  // Rebuild the potential phase factors for the given physical controls.
  void set_step_controls(const ControlPoint& u);

  void forward(cvec& amp);
  void adjoint(cvec& amp);

  const Grid1D& grid() const { return grid_; }
  int particles() const { return particles_; }
  double dt() const { return dt_; }
  const LatticeParams& params() const { return params_; }
  // -Im(V) profile, per 1D coordinate (zero when absorber disabled).
  const std::vector<double>& absorber_profile() const { return gamma_; }

 private:
  void potential_half(cvec& amp, bool conjugated);
  void kinetic_full(cvec& amp, bool conjugated);

  Grid1D grid_;
  int particles_;
  double dt_;
  LatticeParams params_;
  std::vector<double> gamma_;      // absorber strength per point
  std::vector<complex> pf_;        // exp(-(iV+gamma) dt/2) per 1D point
  std::vector<complex> pdiag_;     // extra diagonal factor (2p interaction)
  std::vector<complex> kf_;        // kinetic factor per 1D wavenumber
  fftw_complex* buf_ = nullptr;
  fftw_plan plan_fwd_ = nullptr;
  fftw_plan plan_bwd_ = nullptr;
};

// Midpoint physical controls for step n of a control set.
ControlPoint step_midpoint(const ControlSet& c, std::size_t n);

using StepCallback =
    std::function<void(std::size_t step, double t, const Wavefunction&)>;

Trajectory split_step_1p(const Wavefunction& psi0, const ControlSet& controls,
                         const PropagationConfig& cfg, const LatticeParams& p,
                         const StepCallback& cb = nullptr);
Trajectory split_step_2p(const Wavefunction& psi0, const ControlSet& controls,
                         const PropagationConfig& cfg, const LatticeParams& p,
                         const StepCallback& cb = nullptr);

double fidelity(const Wavefunction& psi, const Wavefunction& target);

// F' = |<pair+|psi>|^2 + |<pair-|psi>|^2 (phase-insensitive transfer quality).
double merge_population(const Wavefunction& psi, const EigenState& plus,
                        const EigenState& minus);

// alpha = arg<pair-|psi> - arg<pair+|psi>, wrapped to [0, 2pi).
double relative_phase(const Wavefunction& psi, const EigenState& plus,
                      const EigenState& minus);

}  // namespace swq

#endif
