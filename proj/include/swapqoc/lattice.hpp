#ifndef SWAPQOC_LATTICE_HPP
#define SWAPQOC_LATTICE_HPP

#include <string>
#include <vector>

#include "swapqoc/units.hpp"

namespace swq {

// Lattice unit cell constants. Energies are stored in natural units
// (hbar/ms); the *_khz accessors exist for user-facing I/O.
struct LatticeParams {
  double site_a = 0.408;        // um, site separation (= lambda/2)
  double v_z_khz = 186.0;       // transverse lattice depth, kHz*h
  double a_s = 5.45e-3;         // um, s-wave scattering length
  double mass_amu = 87.0;

  double k() const { return kPi / site_a; }
  double v_z() const { return khz_to_natural(v_z_khz); }
  double hbar_over_m() const { return UnitSystem{mass_amu}.hbar_over_m(); }
  // Physical cell is [-a, a]; grids pad by 0.2a on each side.
  double cell_half_width() const { return site_a; }
  double padded_half_width() const { return 1.2 * site_a; }
};

struct ControlScaling {
  double beta_scale = 0.52 * kPi;    // rad
  double theta_scale = -0.474 * kPi; // rad
  double v0_scale_khz = 122.0;       // kHz*h

  double v0_scale() const { return khz_to_natural(v0_scale_khz); }
};

// V(x) of the controllable unit cell; beta/theta in rad, v0 in natural
// energy units. Total function of its arguments.
double lattice_potential(double x, double beta, double theta, double v0,
                         const LatticeParams& p);

struct PotentialGradients {
  double d_beta;   // per rad
  double d_theta;  // per rad
  double d_v0;     // dimensionless (V is linear in V0)
};

PotentialGradients lattice_potential_gradients(double x, double beta,
                                               double theta, double v0,
                                               const LatticeParams& p);

// Local transverse harmonic frequencies of the 3D potential, rad/ms.
double omega_z(const LatticeParams& p);
double omega_y(double x, double beta, double theta, double v0,
               const LatticeParams& p);

// Effective 1D coupling g1d(x) = 2 a_s hbar sqrt(omega_y(x) omega_z).
double coupling_g1d(double x, double beta, double theta, double v0,
                    const LatticeParams& p);

struct CouplingGradients {
  double d_beta;
  double d_theta;
  double d_v0;
};

CouplingGradients coupling_g1d_gradients(double x, double beta, double theta,
                                         double v0, const LatticeParams& p);

// Time-gridded control trajectories in scaled (dimensionless) units.
// Samples live at t_j = j*dt, j = 0..samples()-1.
struct ControlSet {
  double dt = 0.0;  // ms
  std::vector<double> beta, theta, v0;  // scaled values
  ControlScaling scaling;

  std::size_t samples() const { return beta.size(); }
  std::size_t steps() const { return beta.size() - 1; }
  double duration() const { return dt * static_cast<double>(steps()); }

  double beta_phys(std::size_t j) const { return beta[j] * scaling.beta_scale; }
  double theta_phys(std::size_t j) const {
    return theta[j] * scaling.theta_scale;
  }
  double v0_phys(std::size_t j) const { return v0[j] * scaling.v0_scale(); }

  ControlSet resampled(double new_dt) const;  // linear interpolation
  ControlSet time_reversed() const;

  void save_csv(const std::string& path) const;
  static ControlSet load_csv(const std::string& path,
                             const ControlScaling& scaling = {});
};

// Constant control at the given scaled values.
ControlSet constant_control(double T, double dt, double beta, double theta,
                            double v0, const ControlScaling& scaling = {});

// Merge reference: beta linear 0 -> 1, theta and v0 constant at 1.
ControlSet linear_merge_control(double T, double dt,
                                const ControlScaling& scaling = {});

// merge + constant hold + time-reversed merge.
ControlSet concat_hold_reverse(const ControlSet& merge, std::size_t hold_steps);

// Diagonalization potential: V(x) inside the physical cell, clamped to
// V_cst = max V over the cell in the padding region.
std::vector<double> clamped_potential(const std::vector<double>& x, double beta,
                                      double theta, double v0,
                                      const LatticeParams& p);

}  // namespace swq

#endif
