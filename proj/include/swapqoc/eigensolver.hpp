#ifndef SWAPQOC_EIGENSOLVER_HPP
#define SWAPQOC_EIGENSOLVER_HPP

#include <string>
#include <vector>

#include "swapqoc/grid.hpp"
#include "swapqoc/lattice.hpp"

namespace swq {

// Physical (unscaled) control values at one instant.
struct ControlPoint {
  double beta = 0.0;   // rad
  double theta = 0.0;  // rad
  double v0 = 0.0;     // natural energy
};

ControlPoint scaled_to_physical(double beta, double theta, double v0,
                                const ControlScaling& s);
ControlPoint control_at(const ControlSet& c, std::size_t j);

// Separated double-well configuration U = {0, 1, 1} and merged single-well
// configuration U = {1, 1, 1}, in scaled units.
ControlPoint separated_point(const ControlScaling& s = {});
ControlPoint merged_point(const ControlScaling& s = {});

struct EigenState {
  Wavefunction psi;
  double energy = 0.0;  // natural units
  int parity = 0;       // +1 / -1 for 2p states, 0 for 1p
  std::string label;
};

// Lowest `count` states of h = -(hbar^2/2m) d^2/dx^2 + V(x) with the 5-point
// Laplacian and the clamped boundary potential.
std::vector<EigenState> single_particle_eigenstates(const Grid1D& grid,
                                                    const ControlPoint& u,
                                                    const LatticeParams& p,
                                                    int count);

// Lowest `count` states of H = h(x1) + h(x2) + g1d delta(x1-x2), the delta
// discretized as g1d((x1+x2)/2)/dx on diagonal cells. Each state is tagged
// with its exchange parity.
std::vector<EigenState> two_particle_eigenstates(const Grid2D& grid,
                                                 const ControlPoint& u,
                                                 const LatticeParams& p,
                                                 int count,
                                                 bool interacting = true);

// g1d evaluated on the grid points for the given controls.
std::vector<double> g1d_field(const Grid1D& grid, const ControlPoint& u,
                              const LatticeParams& p);

// Plain (unsymmetrized) product a(x1) b(x2), normalized.
Wavefunction product_state(const Wavefunction& a, const Wavefunction& b);

// Psi^{+-}(x1,x2) = a(x1)b(x2) +- b(x1)a(x2), normalized.
Wavefunction symmetrized_product(const EigenState& a, const EigenState& b,
                                 int parity);

// U_{a,b} = 2 int |a|^2 |b|^2 g1d dx  (grid quadrature).
double interaction_energy(const EigenState& a, const EigenState& b,
                          const std::vector<double>& g1d);

// Left/right localized ground pair (Lg, Rg) of a double-well configuration,
// built from the two lowest 1p states and assigned by the sign of <x>.
std::pair<EigenState, EigenState> localized_pair(const Grid1D& grid,
                                                 const ControlPoint& u,
                                                 const LatticeParams& p);

struct Classification {
  std::vector<double> overlaps;  // |<basis_i|psi>|^2
  std::size_t best = 0;
  std::string best_label;
};

Classification classify_state(const Wavefunction& psi,
                              const std::vector<EigenState>& basis);

// Named eigenstates of one trap configuration plus the tracked two-particle
// pair whose splitting drives the spin exchange.
struct SpectralBasis {
  std::string configuration;
  std::vector<EigenState> one_particle;  // labeled (Lg,Rg) or (g,e)
  std::vector<EigenState> two_particle;  // lowest 2p states
  EigenState pair_plus, pair_minus;      // phase-aligned exchange pair
  double pair_splitting = 0.0;           // E+ - E-, natural units
};

// Merged configuration: 1p states g,e; pair = (e,g) exchange doublet.
SpectralBasis make_merged_basis(const Grid2D& grid, const ControlPoint& u,
                                const LatticeParams& p, int count_2p = 6);

// Separated configuration: 1p states Lg,Rg; pair = singly-occupied doublet.
SpectralBasis make_separated_basis(const Grid2D& grid, const ControlPoint& u,
                                   const LatticeParams& p, int count_2p = 6);

}  // namespace swq

#endif
