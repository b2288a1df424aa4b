#ifndef SWAPQOC_EXCHANGE_HPP
#define SWAPQOC_EXCHANGE_HPP

#include <array>
#include <utility>

#include "swapqoc/propagator.hpp"

namespace swq {

// Instantaneous interaction energy U_{a(t),b(t)} and the accumulated
// relative phase alpha(t) along a ramp, in the independent-particle picture.
struct PhaseTrace {
  std::vector<double> times;
  std::vector<double> U;      // natural units
  std::vector<double> alpha;  // rad
};

enum class PhaseMode {
  tracked_eigenstates,  // adiabatic: follow instantaneous 1p eigenstates
  propagated,           // diabatic: independently propagated 1p states
};

// Follows the single-particle pair starting from (Lg, Rg) of the initial
// configuration; alpha by trapezoidal accumulation of U/hbar.
PhaseTrace adiabatic_phase(const ControlSet& controls, const Grid1D& grid,
                           const LatticeParams& p, PhaseMode mode,
                           int samples = 201);

struct SwapDurations {
  double t_swap;       // pi hbar / U
  double t_sqrt_swap;  // t_swap / 2
  double wait;         // (pi/2 - 2 alpha) hbar / U  (merge + separate)
};

SwapDurations swap_durations(double u, double alpha_accrued);

using SpinState = std::array<complex, 4>;   // {dd, ud, du, uu}
using SpinMatrix = std::array<complex, 16>; // row-major 4x4

SpinMatrix spin_hamiltonian(double j_ex);

// Closed-form exp(-i H_spin t) s0 via the singlet/triplet decomposition.
SpinState spin_evolution(double j_ex, double t, const SpinState& s0);

// Independent single-particle propagation of the (Lg, Rg) pair.
std::pair<Trajectory, Trajectory> independent_densities(
    const ControlSet& controls, const Grid1D& grid, const LatticeParams& p,
    const PropagationConfig& cfg);

}  // namespace swq

#endif
