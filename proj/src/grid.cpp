#include "swapqoc/grid.hpp"

#include <cmath>

#include "swapqoc/units.hpp"

namespace swq {

static bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

Grid1D make_grid_1d(int n, double x_min, double x_max) {
  if (!is_power_of_two(n) || n < 32) {
    throw std::invalid_argument("grid size must be a power of two >= 32");
  }
  if (!(x_min < x_max)) {
    throw std::invalid_argument("grid bounds inverted");
  }
  Grid1D g;
  g.n = n;
  g.x_min = x_min;
  g.x_max = x_max;
  g.dx = (x_max - x_min) / n;
  g.points.resize(n);
  for (int j = 0; j < n; ++j) g.points[j] = x_min + j * g.dx;
  return g;
}

std::vector<double> wavenumbers(const Grid1D& grid) {
  std::vector<double> k(grid.n);
  const double dk = 2.0 * kPi / (grid.n * grid.dx);
  for (int j = 0; j < grid.n; ++j) {
    k[j] = (j < grid.n / 2) ? j * dk : (j - grid.n) * dk;
  }
  return k;
}

Wavefunction make_wavefunction(const Grid1D& grid, int particles) {
  if (particles != 1 && particles != 2) {
    throw std::invalid_argument("particles must be 1 or 2");
  }
  Wavefunction w;
  w.grid = grid;
  w.particles = particles;
  w.amp.assign(w.size(), complex{0.0, 0.0});
  return w;
}

complex inner_product(const Wavefunction& a, const Wavefunction& b) {
  if (!(a.grid == b.grid) || a.particles != b.particles) {
    throw std::invalid_argument("inner_product: grid or dimensionality mismatch");
  }
  complex s{0.0, 0.0};
  for (std::size_t i = 0; i < a.amp.size(); ++i) {
    s += std::conj(a.amp[i]) * b.amp[i];
  }
  return s * a.cell();
}

double norm(const Wavefunction& a) {
  double s = 0.0;
  for (const auto& c : a.amp) s += std::norm(c);
  return std::sqrt(s * a.cell());
}

void normalize(Wavefunction& a) {
  const double n = norm(a);
  if (n == 0.0) throw std::runtime_error("cannot normalize zero state");
  for (auto& c : a.amp) c /= n;
}

double exchange_parity(const Wavefunction& psi) {
  if (psi.particles != 2) {
    throw std::invalid_argument("exchange_parity requires a two-particle state");
  }
  const int n = psi.grid.n;
  complex s{0.0, 0.0};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      s += std::conj(psi.amp[static_cast<std::size_t>(i) * n + j]) *
           psi.amp[static_cast<std::size_t>(j) * n + i];
    }
  }
  return (s * psi.cell()).real();
}

}  // namespace swq
