#include "swapqoc/eigensolver.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace swq {

ControlPoint scaled_to_physical(double beta, double theta, double v0,
                                const ControlScaling& s) {
  return {beta * s.beta_scale, theta * s.theta_scale, v0 * s.v0_scale()};
}

ControlPoint control_at(const ControlSet& c, std::size_t j) {
  return {c.beta_phys(j), c.theta_phys(j), c.v0_phys(j)};
}

ControlPoint separated_point(const ControlScaling& s) {
  return scaled_to_physical(0.0, 1.0, 1.0, s);
}

ControlPoint merged_point(const ControlScaling& s) {
  return scaled_to_physical(1.0, 1.0, 1.0, s);
}

namespace {

// Lowest `count` eigenpairs of a symmetric banded matrix (upper storage,
// column-major, ldab = kd+1). Eigenvectors have unit 2-norm.
void sbevx_lowest(int n, int kd, std::vector<double>& ab, int count,
                  std::vector<double>& w, std::vector<double>& z) {
  const int ldab = kd + 1;
  std::vector<double> q(static_cast<std::size_t>(n) * n);
  w.assign(n, 0.0);
  z.assign(static_cast<std::size_t>(n) * count, 0.0);
  std::vector<lapack_int> ifail(n, 0);
  lapack_int m = 0;
  const double abstol = 2.0 * LAPACKE_dlamch('S');
  const lapack_int info = LAPACKE_dsbevx(
      LAPACK_COL_MAJOR, 'V', 'I', 'U', n, kd, ab.data(), ldab, q.data(), n,
      0.0, 0.0, 1, count, abstol, &m, w.data(), z.data(), n, ifail.data());
  if (info != 0 || m < count) {
    throw std::runtime_error("banded eigensolver failed to converge");
  }
  w.resize(count);
}

constexpr double kLaplaceDiag = 30.0 / 12.0;
constexpr double kLaplaceOff1 = -16.0 / 12.0;
constexpr double kLaplaceOff2 = 1.0 / 12.0;

}  // namespace

std::vector<double> g1d_field(const Grid1D& grid, const ControlPoint& u,
                              const LatticeParams& p) {
  std::vector<double> g(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    g[i] = coupling_g1d(grid.points[i], u.beta, u.theta, u.v0, p);
  }
  return g;
}

std::vector<EigenState> single_particle_eigenstates(const Grid1D& grid,
                                                    const ControlPoint& u,
                                                    const LatticeParams& p,
                                                    int count) {
  const int n = grid.n;
  const double hm = p.hbar_over_m();
  const double kin = 0.5 * hm / (grid.dx * grid.dx);
  const std::vector<double> v =
      clamped_potential(grid.points, u.beta, u.theta, u.v0, p);

  const int kd = 2;
  const int ldab = kd + 1;
  std::vector<double> ab(static_cast<std::size_t>(ldab) * n, 0.0);
  auto at = [&](int i, int j) -> double& {
    return ab[static_cast<std::size_t>(kd + i - j) + static_cast<std::size_t>(j) * ldab];
  };
  for (int j = 0; j < n; ++j) {
    at(j, j) = v[j] + kin * kLaplaceDiag;
    if (j >= 1) at(j - 1, j) = kin * kLaplaceOff1;
    if (j >= 2) at(j - 2, j) = kin * kLaplaceOff2;
  }

  std::vector<double> w, z;
  sbevx_lowest(n, kd, ab, count, w, z);

  std::vector<EigenState> out(count);
  const double gnorm = std::sqrt(grid.dx);
  for (int s = 0; s < count; ++s) {
    out[s].psi = make_wavefunction(grid, 1);
    for (int i = 0; i < n; ++i) {
      out[s].psi.amp[i] = z[static_cast<std::size_t>(s) * n + i] / gnorm;
    }
    out[s].energy = w[s];
    out[s].parity = 0;
  }
  return out;
}

std::vector<EigenState> two_particle_eigenstates(const Grid2D& grid,
                                                 const ControlPoint& u,
                                                 const LatticeParams& p,
                                                 int count, bool interacting) {
  const int n = grid.base.n;
  const int N = n * n;
  const double dx = grid.base.dx;
  const double hm = p.hbar_over_m();
  const double kin = 0.5 * hm / (dx * dx);
  const std::vector<double> v =
      clamped_potential(grid.base.points, u.beta, u.theta, u.v0, p);
  const std::vector<double> g =
      interacting ? g1d_field(grid.base, u, p) : std::vector<double>(n, 0.0);

  const int kd = 2 * n;
  const int ldab = kd + 1;
  std::vector<double> ab(static_cast<std::size_t>(ldab) * N, 0.0);
  auto at = [&](int i, int j) -> double& {
    return ab[static_cast<std::size_t>(kd + i - j) + static_cast<std::size_t>(j) * ldab];
  };
  for (int i1 = 0; i1 < n; ++i1) {
    for (int i2 = 0; i2 < n; ++i2) {
      const int J = i1 * n + i2;
      double diag = v[i1] + v[i2] + 2.0 * kin * kLaplaceDiag;
      if (i1 == i2) diag += g[i1] / dx;
      at(J, J) = diag;
      if (i2 >= 1) at(J - 1, J) = kin * kLaplaceOff1;
      if (i2 >= 2) at(J - 2, J) = kin * kLaplaceOff2;
      if (i1 >= 1) at(J - n, J) = kin * kLaplaceOff1;
      if (i1 >= 2) at(J - 2 * n, J) = kin * kLaplaceOff2;
    }
  }

  std::vector<double> w, z;
  sbevx_lowest(N, kd, ab, count, w, z);

  std::vector<EigenState> out(count);
  const double gnorm = dx;  // sqrt(dx^2)
  for (int s = 0; s < count; ++s) {
    out[s].psi = make_wavefunction(grid.base, 2);
    for (int i = 0; i < N; ++i) {
      out[s].psi.amp[i] = z[static_cast<std::size_t>(s) * N + i] / gnorm;
    }
    out[s].energy = w[s];
  }

  // Near-degenerate clusters can come back as arbitrary mixtures; replace
  // them with their exchange-parity projections so every state is tagged.
  const double cluster_tol = 1e-8 * std::max(1.0, std::abs(w.back()));
  int s = 0;
  while (s < count) {
    int e = s + 1;
    while (e < count && std::abs(w[e] - w[e - 1]) < cluster_tol) ++e;
    if (e - s > 1) {
      std::vector<Wavefunction> projected;
      for (int parity : {-1, +1}) {
        for (int q = s; q < e; ++q) {
          Wavefunction proj = out[q].psi;
          for (int i1 = 0; i1 < n; ++i1) {
            for (int i2 = 0; i2 < n; ++i2) {
              proj.amp[static_cast<std::size_t>(i1) * n + i2] =
                  0.5 * (out[q].psi.amp[static_cast<std::size_t>(i1) * n + i2] +
                         static_cast<double>(parity) *
                             out[q].psi.amp[static_cast<std::size_t>(i2) * n + i1]);
            }
          }
          // Gram-Schmidt against already accepted vectors
          for (const auto& prev : projected) {
            Wavefunction pw{proj.grid, 2, {}};
            const complex ov = [&] {
              complex acc{0, 0};
              for (std::size_t i = 0; i < proj.amp.size(); ++i) {
                acc += std::conj(prev.amp[i]) * proj.amp[i];
              }
              return acc * proj.cell();
            }();
            for (std::size_t i = 0; i < proj.amp.size(); ++i) {
              proj.amp[i] -= ov * prev.amp[i];
            }
          }
          if (norm(proj) > 1e-4) {
            normalize(proj);
            projected.push_back(proj);
            if (static_cast<int>(projected.size()) == e - s) break;
          }
        }
        if (static_cast<int>(projected.size()) == e - s) break;
      }
      if (static_cast<int>(projected.size()) == e - s) {
        for (int q = s; q < e; ++q) out[q].psi = projected[q - s];
      }
    }
    s = e;
  }

  for (auto& st : out) {
    const double par = exchange_parity(st.psi);
    st.parity = par > 0.999 ? +1 : (par < -0.999 ? -1 : 0);
  }
  return out;
}

Wavefunction product_state(const Wavefunction& a, const Wavefunction& b) {
  if (!(a.grid == b.grid) || a.particles != 1 || b.particles != 1) {
    throw std::invalid_argument("product_state: incompatible 1p states");
  }
  const int n = a.grid.n;
  Wavefunction out = make_wavefunction(a.grid, 2);
  for (int i1 = 0; i1 < n; ++i1) {
    for (int i2 = 0; i2 < n; ++i2) {
      out.amp[static_cast<std::size_t>(i1) * n + i2] = a.amp[i1] * b.amp[i2];
    }
  }
  normalize(out);
  return out;
}

Wavefunction symmetrized_product(const EigenState& a, const EigenState& b,
                                 int parity) {
  if (parity != 1 && parity != -1) {
    throw std::invalid_argument("parity must be +1 or -1");
  }
  const int n = a.psi.grid.n;
  Wavefunction out = make_wavefunction(a.psi.grid, 2);
  for (int i1 = 0; i1 < n; ++i1) {
    for (int i2 = 0; i2 < n; ++i2) {
      out.amp[static_cast<std::size_t>(i1) * n + i2] =
          a.psi.amp[i1] * b.psi.amp[i2] +
          static_cast<double>(parity) * b.psi.amp[i1] * a.psi.amp[i2];
    }
  }
  if (norm(out) < 1e-10) {
    throw std::invalid_argument("symmetrized_product: antisymmetric combination of identical states is zero");
  }
  normalize(out);
  return out;
}

double interaction_energy(const EigenState& a, const EigenState& b,
                          const std::vector<double>& g1d) {
  const int n = a.psi.grid.n;
  double u = 0.0;
  for (int i = 0; i < n; ++i) {
    u += std::norm(a.psi.amp[i]) * std::norm(b.psi.amp[i]) * g1d[i];
  }
  return 2.0 * u * a.psi.grid.dx;
}

Classification classify_state(const Wavefunction& psi,
                              const std::vector<EigenState>& basis) {
  if (basis.empty()) throw std::invalid_argument("classify_state: empty basis");
  Classification c;
  c.overlaps.resize(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    c.overlaps[i] = std::norm(inner_product(basis[i].psi, psi));
    if (c.overlaps[i] > c.overlaps[c.best]) c.best = i;
  }
  c.best_label = basis[c.best].label;
  return c;
}

namespace {

double amp_sum(const Wavefunction& w) {
  double s = 0.0;
  for (const auto& c : w.amp) s += c.real();
  return s;
}

void fix_sign_positive(Wavefunction& w) {
  if (amp_sum(w) < 0.0) {
    for (auto& c : w.amp) c = -c;
  }
}

double mean_x(const Wavefunction& w) {
  double m = 0.0;
  for (int i = 0; i < w.grid.n; ++i) {
    m += w.grid.points[i] * std::norm(w.amp[i]);
  }
  return m * w.grid.dx;
}

// Multiply by -1 if needed so that <product|state> is positive real.
void align_with(EigenState& state, const Wavefunction& product) {
  if (inner_product(product, state.psi).real() < 0.0) {
    for (auto& c : state.psi.amp) c = -c;
  }
}

}  // namespace

std::pair<EigenState, EigenState> localized_pair(const Grid1D& grid,
                                                 const ControlPoint& u,
                                                 const LatticeParams& p) {
  auto sp = single_particle_eigenstates(grid, u, p, 2);
  EigenState left, right;
  left.psi = make_wavefunction(grid, 1);
  right.psi = make_wavefunction(grid, 1);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < grid.n; ++i) {
    left.psi.amp[i] = (sp[0].psi.amp[i] + sp[1].psi.amp[i]) * inv_sqrt2;
    right.psi.amp[i] = (sp[0].psi.amp[i] - sp[1].psi.amp[i]) * inv_sqrt2;
  }
  if (mean_x(left.psi) > mean_x(right.psi)) std::swap(left.psi, right.psi);
  fix_sign_positive(left.psi);
  fix_sign_positive(right.psi);
  left.energy = right.energy = 0.5 * (sp[0].energy + sp[1].energy);
  left.label = "Lg";
  right.label = "Rg";
  return {std::move(left), std::move(right)};
}

SpectralBasis make_merged_basis(const Grid2D& grid, const ControlPoint& u,
                                const LatticeParams& p, int count_2p) {
  SpectralBasis basis;
  basis.configuration = "merged";

  auto sp = single_particle_eigenstates(grid.base, u, p, 2);
  EigenState g = sp[0], e = sp[1];
  fix_sign_positive(g.psi);
  // orient e so that <g|x|e> > 0
  {
    double ov = 0.0;
    for (int i = 0; i < grid.base.n; ++i) {
      ov += g.psi.amp[i].real() * grid.base.points[i] * e.psi.amp[i].real();
    }
    if (ov < 0.0) {
      for (auto& c : e.psi.amp) c = -c;
    }
  }
  g.label = "g";
  e.label = "e";
  basis.one_particle = {g, e};

  basis.two_particle = two_particle_eigenstates(grid, u, p, count_2p);
  const Wavefunction plus_prod = symmetrized_product(e, g, +1);
  const Wavefunction minus_prod = symmetrized_product(e, g, -1);

  double best_plus = -1.0, best_minus = -1.0;
  for (const auto& st : basis.two_particle) {
    const double op = std::norm(inner_product(plus_prod, st.psi));
    const double om = std::norm(inner_product(minus_prod, st.psi));
    if (st.parity >= 0 && op > best_plus) {
      best_plus = op;
      basis.pair_plus = st;
    }
    if (st.parity <= 0 && om > best_minus) {
      best_minus = om;
      basis.pair_minus = st;
    }
  }
  if (best_plus < 0.5 || best_minus < 0.5) {
    throw std::runtime_error("merged basis: exchange pair not found among lowest states");
  }
  align_with(basis.pair_plus, plus_prod);
  align_with(basis.pair_minus, minus_prod);
  basis.pair_plus.label = "Psi+_eg";
  basis.pair_minus.label = "Psi-_eg";
  basis.pair_splitting = basis.pair_plus.energy - basis.pair_minus.energy;
  return basis;
}

SpectralBasis make_separated_basis(const Grid2D& grid, const ControlPoint& u,
                                   const LatticeParams& p, int count_2p) {
  SpectralBasis basis;
  basis.configuration = "separated";

  auto [left, right] = localized_pair(grid.base, u, p);
  basis.one_particle = {left, right};

  basis.two_particle = two_particle_eigenstates(grid, u, p, count_2p);
  const Wavefunction plus_prod = symmetrized_product(left, right, +1);
  const Wavefunction minus_prod = symmetrized_product(left, right, -1);

  double best_plus = -1.0, best_minus = -1.0;
  for (const auto& st : basis.two_particle) {
    const double op = std::norm(inner_product(plus_prod, st.psi));
    const double om = std::norm(inner_product(minus_prod, st.psi));
    if (st.parity >= 0 && op > best_plus) {
      best_plus = op;
      basis.pair_plus = st;
    }
    if (st.parity <= 0 && om > best_minus) {
      best_minus = om;
      basis.pair_minus = st;
    }
  }
  if (best_plus < 0.5 || best_minus < 0.5) {
    throw std::runtime_error("separated basis: singly-occupied pair not found among lowest states");
  }
  align_with(basis.pair_plus, plus_prod);
  align_with(basis.pair_minus, minus_prod);
  basis.pair_plus.label = "Psi+_LgRg";
  basis.pair_minus.label = "Psi-_LgRg";
  basis.pair_splitting = basis.pair_plus.energy - basis.pair_minus.energy;
  return basis;
}

}  // namespace swq
