#include "swapqoc/exchange.hpp"

#include <cmath>
#include <stdexcept>

namespace swq {

namespace {

double pair_interaction(const Wavefunction& a, const Wavefunction& b,
                        const std::vector<double>& g) {
  double u = 0.0;
  for (int i = 0; i < a.grid.n; ++i) {
    u += std::norm(a.amp[i]) * std::norm(b.amp[i]) * g[i];
  }
  return 2.0 * u * a.grid.dx;
}

// Sample indices: `samples` points spread over the control, endpoints included.
std::vector<std::size_t> sample_indices(std::size_t steps, int samples) {
  std::vector<std::size_t> idx;
  const int m = std::max(samples, 2);
  for (int s = 0; s < m; ++s) {
    idx.push_back(static_cast<std::size_t>(
        std::llround(static_cast<double>(s) * static_cast<double>(steps) /
                     (m - 1))));
  }
  return idx;
}

void accumulate_alpha(PhaseTrace& trace) {
  trace.alpha.assign(trace.times.size(), 0.0);
  for (std::size_t i = 1; i < trace.times.size(); ++i) {
    trace.alpha[i] = trace.alpha[i - 1] +
                     0.5 * (trace.U[i] + trace.U[i - 1]) *
                         (trace.times[i] - trace.times[i - 1]);
  }
}

}  // namespace

PhaseTrace adiabatic_phase(const ControlSet& controls, const Grid1D& grid,
                           const LatticeParams& p, PhaseMode mode,
                           int samples) {
  const auto idx = sample_indices(controls.steps(), samples);
  PhaseTrace trace;

  auto [lg, rg] = localized_pair(grid, control_at(controls, 0), p);
  Wavefunction a = std::move(lg.psi);
  Wavefunction b = std::move(rg.psi);

  if (mode == PhaseMode::tracked_eigenstates) {
    for (std::size_t j : idx) {
      const ControlPoint u = control_at(controls, j);
      const auto states = single_particle_eigenstates(grid, u, p, 4);
      // Near-degenerate levels (e.g. the balanced double well) may come back
      // as arbitrary in-cluster mixtures, so follow the projection onto the
      // whole cluster of the best-matching state rather than a single level.
      const double cluster_tol = khz_to_natural(0.05);
      auto track = [&](Wavefunction& cur) {
        double best = -1.0;
        std::size_t best_i = 0;
        Wavefunction prev = cur;
        std::vector<complex> ov(states.size());
        for (std::size_t i = 0; i < states.size(); ++i) {
          ov[i] = inner_product(states[i].psi, prev);
          if (std::norm(ov[i]) > best) {
            best = std::norm(ov[i]);
            best_i = i;
          }
        }
        Wavefunction proj = make_wavefunction(prev.grid, 1);
        double weight = 0.0;
        for (std::size_t i = 0; i < states.size(); ++i) {
          if (std::abs(states[i].energy - states[best_i].energy) > cluster_tol) {
            continue;
          }
          weight += std::norm(ov[i]);
          for (std::size_t q = 0; q < proj.amp.size(); ++q) {
            proj.amp[q] += ov[i] * states[i].psi.amp[q];
          }
        }
        if (weight < 0.81) {  // overlap continuity >= 0.9 in amplitude
          throw std::runtime_error("adiabatic_phase: eigenstate tracking lost");
        }
        normalize(proj);
        cur = std::move(proj);
        if (inner_product(prev, cur).real() < 0.0) {
          for (auto& c : cur.amp) c = -c;
        }
      };
      if (j != 0) {
        track(a);
        track(b);
      }
      const auto g = g1d_field(grid, u, p);
      trace.times.push_back(static_cast<double>(j) * controls.dt);
      trace.U.push_back(pair_interaction(a, b, g));
    }
  } else {
    // Diabatic mode: propagate both states once, sampling U along the way.
    std::vector<Wavefunction> a_snap, b_snap;
    auto collect = [&](std::vector<Wavefunction>& dst, const Wavefunction& psi0) {
      std::size_t next = 0;
      dst.clear();
      PropagationConfig cfg;
      cfg.dt = controls.dt;
      split_step_1p(psi0, controls, cfg, p,
                    [&](std::size_t step, double, const Wavefunction& psi) {
                      while (next < idx.size() && idx[next] == 0) {
                        dst.push_back(psi0);
                        ++next;
                      }
                      if (next < idx.size() && step == idx[next]) {
                        dst.push_back(psi);
                        ++next;
                      }
                    });
      while (next < idx.size()) {  // idx 0 when no steps fired
        dst.push_back(psi0);
        ++next;
      }
    };
    collect(a_snap, a);
    collect(b_snap, b);
    for (std::size_t s = 0; s < idx.size(); ++s) {
      const ControlPoint u = control_at(controls, idx[s]);
      const auto g = g1d_field(grid, u, p);
      trace.times.push_back(static_cast<double>(idx[s]) * controls.dt);
      trace.U.push_back(pair_interaction(a_snap[s], b_snap[s], g));
    }
  }

  accumulate_alpha(trace);
  return trace;
}

SwapDurations swap_durations(double u, double alpha_accrued) {
  if (!(u > 0.0)) throw std::domain_error("swap_durations: U must be positive");
  if (alpha_accrued > kPi / 4.0) {
    throw std::domain_error("swap_durations: alpha > pi/4, wait would be negative");
  }
  SwapDurations d;
  d.t_swap = kPi / u;
  d.t_sqrt_swap = 0.5 * d.t_swap;
  d.wait = (kPi / 2.0 - 2.0 * alpha_accrued) / u;
  return d;
}

SpinMatrix spin_hamiltonian(double j_ex) {
  SpinMatrix h{};
  const double q = j_ex / 4.0;
  h[0] = q;
  h[5] = -q;
  h[6] = 2.0 * q;
  h[9] = 2.0 * q;
  h[10] = -q;
  h[15] = q;
  return h;
}

SpinState spin_evolution(double j_ex, double t, const SpinState& s0) {
  const double e_plus = j_ex / 4.0;    // triplet
  const double e_minus = -3.0 * j_ex / 4.0;  // singlet
  const complex ph_p = std::exp(complex{0.0, -e_plus * t});
  const complex ph_m = std::exp(complex{0.0, -e_minus * t});
  const complex tr = (s0[1] + s0[2]) / std::sqrt(2.0);
  const complex sg = (s0[1] - s0[2]) / std::sqrt(2.0);
  SpinState s;
  s[0] = ph_p * s0[0];
  s[3] = ph_p * s0[3];
  s[1] = (ph_p * tr + ph_m * sg) / std::sqrt(2.0);
  s[2] = (ph_p * tr - ph_m * sg) / std::sqrt(2.0);
  return s;
}

std::pair<Trajectory, Trajectory> independent_densities(
    const ControlSet& controls, const Grid1D& grid, const LatticeParams& p,
    const PropagationConfig& cfg) {
  auto [lg, rg] = localized_pair(grid, control_at(controls, 0), p);
  Trajectory a = split_step_1p(lg.psi, controls, cfg, p);
  Trajectory b = split_step_1p(rg.psi, controls, cfg, p);
  return {std::move(a), std::move(b)};
}

}  // namespace swq
