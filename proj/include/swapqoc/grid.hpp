#ifndef SWAPQOC_GRID_HPP
#define SWAPQOC_GRID_HPP

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace swq {

using complex = std::complex<double>;
using cvec = std::vector<complex>;

// Uniform 1D grid on [x_min, x_max) with n a power of two (split-step FFT).
struct Grid1D {
  int n = 0;
  double x_min = 0.0;
  double x_max = 0.0;
  double dx = 0.0;
  std::vector<double> points;

  bool operator==(const Grid1D& o) const {
    return n == o.n && x_min == o.x_min && x_max == o.x_max;
  }
};

Grid1D make_grid_1d(int n, double x_min, double x_max);

// Square two-particle grid: both coordinates share the same 1D axis.
struct Grid2D {
  Grid1D base;
  std::size_t n_total() const {
    return static_cast<std::size_t>(base.n) * base.n;
  }
};

// DFT wavenumbers, standard ordering: k_j = 2*pi*j/(n*dx) for j < n/2,
// then the negative frequencies.
std::vector<double> wavenumbers(const Grid1D& grid);

struct Wavefunction {
  Grid1D grid;
  int particles = 1;  // 1 or 2
  cvec amp;           // size n (1p) or n*n row-major in x1 (2p)

  double cell() const { return particles == 1 ? grid.dx : grid.dx * grid.dx; }
  std::size_t size() const {
    return particles == 1 ? static_cast<std::size_t>(grid.n)
                          : static_cast<std::size_t>(grid.n) * grid.n;
  }
};

Wavefunction make_wavefunction(const Grid1D& grid, int particles);

complex inner_product(const Wavefunction& a, const Wavefunction& b);
double norm(const Wavefunction& a);
void normalize(Wavefunction& a);

// <P12> for a two-particle state; +-1 for definite exchange parity.
double exchange_parity(const Wavefunction& psi);

}  // namespace swq

#endif
