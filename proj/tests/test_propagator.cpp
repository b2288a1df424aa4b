#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "swapqoc/propagator.hpp"

using namespace swq;

namespace {

const LatticeParams kParams;
const ControlScaling kScaling;

Grid1D padded_grid(int n) {
  return make_grid_1d(n, -kParams.padded_half_width(),
                      kParams.padded_half_width());
}

PropagationConfig no_absorber(double dt) {
  PropagationConfig cfg;
  cfg.dt = dt;
  cfg.absorber.enabled = false;
  return cfg;
}

double second_moment(const Wavefunction& psi) {
  double m = 0.0;
  for (int i = 0; i < psi.grid.n; ++i) {
    m += psi.grid.points[i] * psi.grid.points[i] * std::norm(psi.amp[i]);
  }
  return m * psi.grid.dx;
}

}  // namespace

TEST_CASE("ground state is stationary under constant controls") {
  const Grid1D grid = padded_grid(64);
  const auto sp = single_particle_eigenstates(grid, separated_point(), kParams, 1);
  const double T = 1e-3;
  const double dt = 1e-5;
  const ControlSet u = constant_control(T, dt, 0.0, 1.0, 1.0);
  const Trajectory traj = split_step_1p(sp[0].psi, u, no_absorber(dt), kParams);

  const complex ov = inner_product(sp[0].psi, traj.final_state());
  CHECK(std::abs(ov) == doctest::Approx(1.0).epsilon(1e-8));
  // phase advances as exp(-i E0 T); |E0 T| < pi here so no wrapping
  CHECK(std::arg(ov) == doctest::Approx(-sp[0].energy * T).epsilon(1e-3));
  // the state itself, not just the overlap, must be unchanged up to phase;
  // the banded eigenstate differs from the spectral one at the stencil
  // truncation level (~1e-4)
  double dev = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    dev += std::norm(traj.final_state().amp[i] - ov * sp[0].psi.amp[i]);
  }
  CHECK(std::sqrt(dev * grid.dx) < 1e-3);
}

TEST_CASE("free Gaussian wave packet spreads analytically") {
  const Grid1D grid = padded_grid(128);
  const double sigma0 = 0.05;
  Wavefunction psi = make_wavefunction(grid, 1);
  for (int i = 0; i < grid.n; ++i) {
    const double x = grid.points[i];
    psi.amp[i] = std::exp(-x * x / (4.0 * sigma0 * sigma0));
  }
  normalize(psi);

  const double T = 0.01;
  const double dt = 1e-5;
  // v0 = 0 switches the lattice off entirely
  const ControlSet u = constant_control(T, dt, 0.0, 1.0, 0.0);
  const Trajectory traj = split_step_1p(psi, u, no_absorber(dt), kParams);

  const double rate = kParams.hbar_over_m() * T / (2.0 * sigma0 * sigma0);
  const double sigma_t = sigma0 * std::sqrt(1.0 + rate * rate);
  CHECK(std::sqrt(second_moment(traj.final_state())) ==
        doctest::Approx(sigma_t).epsilon(1e-4));
  CHECK(norm(traj.final_state()) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("norm is conserved over 1e4 steps without absorber") {
  const Grid1D grid = padded_grid(64);
  const auto sp = single_particle_eigenstates(grid, separated_point(), kParams, 2);
  Wavefunction psi = make_wavefunction(grid, 1);
  for (int i = 0; i < grid.n; ++i) {
    psi.amp[i] = (sp[0].psi.amp[i] + complex{0.0, 1.0} * sp[1].psi.amp[i]) /
                 std::sqrt(2.0);
  }
  const double dt = 1.2e-5;
  const ControlSet u = linear_merge_control(0.12, dt);
  REQUIRE(u.steps() == 10000);
  const Trajectory traj = split_step_1p(psi, u, no_absorber(dt), kParams);
  CHECK(std::abs(norm(traj.final_state()) - 1.0) < 1e-10);
  for (const double nr : traj.norms) {
    CHECK(std::abs(nr - 1.0) < 1e-10);
  }
}

TEST_CASE("absorber damps amplitude in the padding region only") {
  const Grid1D grid = padded_grid(64);
  Wavefunction edge = make_wavefunction(grid, 1);
  const double x0 = -1.1 * kParams.site_a;  // inside the padding
  for (int i = 0; i < grid.n; ++i) {
    const double x = grid.points[i];
    edge.amp[i] = std::exp(-(x - x0) * (x - x0) / (2.0 * 0.02 * 0.02));
  }
  normalize(edge);

  const double dt = 1e-5;
  const ControlSet u = constant_control(2e-3, dt, 0.0, 1.0, 1.0);
  PropagationConfig cfg;
  cfg.dt = dt;
  const Trajectory traj = split_step_1p(edge, u, cfg, kParams);
  CHECK(norm(traj.final_state()) < 0.99);

  Stepper on(grid, 1, dt, kParams, cfg.absorber);
  Stepper off(grid, 1, dt, kParams, AbsorberParams{false, 1.0, 50.0});
  double inside_max = 0.0, edge_max = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    const double g = on.absorber_profile()[i];
    CHECK(g >= 0.0);
    if (std::abs(grid.points[i]) <= kParams.site_a) {
      inside_max = std::max(inside_max, g);
    } else {
      edge_max = std::max(edge_max, g);
    }
    CHECK(off.absorber_profile()[i] == 0.0);
  }
  CHECK(inside_max == 0.0);
  CHECK(edge_max > 0.0);
}

TEST_CASE("propagation is time-reversible") {
  const Grid1D grid = padded_grid(64);
  const auto sp = single_particle_eigenstates(grid, separated_point(), kParams, 1);
  const double dt = 1e-4;
  const ControlSet u = linear_merge_control(0.06, dt);
  const Trajectory fwd = split_step_1p(sp[0].psi, u, no_absorber(dt), kParams);

  Wavefunction back = fwd.final_state();
  for (auto& c : back.amp) c = std::conj(c);
  const Trajectory rev =
      split_step_1p(back, u.time_reversed(), no_absorber(dt), kParams);
  Wavefunction recovered = rev.final_state();
  for (auto& c : recovered.amp) c = std::conj(c);

  CHECK(fidelity(recovered, sp[0].psi) >= 1.0 - 1e-10);
}

TEST_CASE("non-interacting two-particle dynamics factorizes") {
  LatticeParams free_params = kParams;
  free_params.a_s = 0.0;
  const Grid1D grid = padded_grid(32);
  const auto [lg, rg] = localized_pair(grid, separated_point(), free_params);
  const Wavefunction psi0 = product_state(lg.psi, rg.psi);

  const double dt = 1e-4;
  const ControlSet u = linear_merge_control(0.06, dt);
  const Trajectory t2 = split_step_2p(psi0, u, no_absorber(dt), free_params);
  const Trajectory ta = split_step_1p(lg.psi, u, no_absorber(dt), free_params);
  const Trajectory tb = split_step_1p(rg.psi, u, no_absorber(dt), free_params);

  const Wavefunction prod =
      product_state(ta.final_state(), tb.final_state());
  CHECK(fidelity(t2.final_state(), prod) >= 1.0 - 1e-6);
}

TEST_CASE("exchange parity is conserved") {
  const Grid1D grid = padded_grid(32);
  const Grid2D grid2{grid};
  const auto basis = make_separated_basis(grid2, separated_point(), kParams);
  const double dt = 1e-4;
  const ControlSet u = linear_merge_control(0.06, dt);

  for (const EigenState* st : {&basis.pair_plus, &basis.pair_minus}) {
    const Trajectory traj = split_step_2p(st->psi, u, no_absorber(dt), kParams);
    CHECK(exchange_parity(traj.final_state()) ==
          doctest::Approx(static_cast<double>(st->parity)).epsilon(1e-8));
  }
}

TEST_CASE("exchange beating at the merged configuration") {
  const Grid1D grid = padded_grid(32);
  const Grid2D grid2{grid};
  const auto basis = make_merged_basis(grid2, merged_point(), kParams);

  Wavefunction psi0 = make_wavefunction(grid, 2);
  for (std::size_t i = 0; i < psi0.amp.size(); ++i) {
    psi0.amp[i] = (basis.pair_plus.psi.amp[i] + basis.pair_minus.psi.amp[i]) /
                  std::sqrt(2.0);
  }

  const double T = 0.05;
  const double dt = 1.2e-5;
  const ControlSet u = constant_control(T, dt, 1.0, 1.0, 1.0);
  const Trajectory traj = split_step_2p(psi0, u, no_absorber(dt), kParams);
  const Wavefunction& fin = traj.final_state();

  // population stays in the pair; phase accrues at the splitting rate
  CHECK(merge_population(fin, basis.pair_plus, basis.pair_minus) >=
        1.0 - 1e-4);
  const double expected = basis.pair_splitting * T;  // ~1 rad
  CHECK(relative_phase(fin, basis.pair_plus, basis.pair_minus) ==
        doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("fidelity, merge population and relative phase") {
  const Grid1D grid = padded_grid(32);
  const Grid2D grid2{grid};
  const auto basis = make_merged_basis(grid2, merged_point(), kParams);

  auto mix = [&](double phi) {
    Wavefunction w = make_wavefunction(grid, 2);
    const complex f = std::exp(complex{0.0, phi});
    for (std::size_t i = 0; i < w.amp.size(); ++i) {
      w.amp[i] = (basis.pair_plus.psi.amp[i] + f * basis.pair_minus.psi.amp[i]) /
                 std::sqrt(2.0);
    }
    return w;
  };

  const double alpha_t = 0.33;
  const Wavefunction target = mix(alpha_t);
  CHECK(fidelity(target, target) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fidelity(basis.pair_plus.psi, basis.pair_minus.psi) ==
        doctest::Approx(0.0).epsilon(1e-12));

  for (const double phi : {0.0, 0.33, 1.2, 4.0}) {
    const Wavefunction w = mix(phi);
    const double fp = merge_population(w, basis.pair_plus, basis.pair_minus);
    const double f = fidelity(w, target);
    CHECK(fp == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(relative_phase(w, basis.pair_plus, basis.pair_minus) ==
          doctest::Approx(phi).epsilon(1e-10));
    CHECK(f <= fp + 1e-12);
    if (phi == alpha_t) {
      CHECK(f == doctest::Approx(fp).epsilon(1e-10));
    } else {
      // F = F' cos^2((phi - alpha)/2)
      CHECK(f == doctest::Approx(std::pow(std::cos(0.5 * (phi - alpha_t)), 2))
                     .epsilon(1e-8));
    }
  }

  // no weight on pair-: relative phase is undefined
  CHECK_THROWS(relative_phase(basis.pair_plus.psi, basis.pair_plus,
                              basis.pair_minus));
}

TEST_CASE("step midpoints average adjacent samples") {
  const ControlSet u = linear_merge_control(0.1, 1e-3);
  const ControlPoint mid = step_midpoint(u, 3);
  CHECK(mid.beta ==
        doctest::Approx(0.5 * (u.beta_phys(3) + u.beta_phys(4))).epsilon(1e-14));
  CHECK(mid.theta == doctest::Approx(u.theta_phys(0)).epsilon(1e-14));
  CHECK(mid.v0 == doctest::Approx(u.v0_phys(0)).epsilon(1e-14));
}

TEST_CASE("dt mismatch between config and controls is rejected") {
  const Grid1D grid = padded_grid(32);
  const auto sp = single_particle_eigenstates(grid, separated_point(), kParams, 1);
  const ControlSet u = constant_control(0.01, 1e-4, 0.0, 1.0, 1.0);
  PropagationConfig cfg = no_absorber(2e-4);
  CHECK_THROWS(split_step_1p(sp[0].psi, u, cfg, kParams));
}
