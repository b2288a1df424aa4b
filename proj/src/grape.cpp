#include "swapqoc/grape.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>

#include "swapqoc/lbfgs.hpp"

namespace swq {

namespace {

constexpr int kChannels = 3;

double channel_scale(const ControlScaling& s, int ch) {
  switch (ch) {
    case 0: return s.beta_scale;
    case 1: return s.theta_scale;
    default: return s.v0_scale();
  }
}

std::vector<double>& channel(ControlSet& c, int ch) {
  switch (ch) {
    case 0: return c.beta;
    case 1: return c.theta;
    default: return c.v0;
  }
}

const std::vector<double>& channel(const ControlSet& c, int ch) {
  switch (ch) {
    case 0: return c.beta;
    case 1: return c.theta;
    default: return c.v0;
  }
}

ControlBounds channel_bounds(const CostWeights& w, int ch) {
  switch (ch) {
    case 0: return w.beta;
    case 1: return w.theta;
    default: return w.v0;
  }
}

std::vector<double> pack(const ControlSet& c) {
  std::vector<double> x;
  x.reserve(kChannels * c.samples());
  for (int ch = 0; ch < kChannels; ++ch) {
    const auto& u = channel(c, ch);
    x.insert(x.end(), u.begin(), u.end());
  }
  return x;
}

void unpack(const std::vector<double>& x, ControlSet& c) {
  const std::size_t m = c.samples();
  for (int ch = 0; ch < kChannels; ++ch) {
    auto& u = channel(c, ch);
    std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(ch * m), m, u.begin());
  }
}

// sum_ij conj(chi)_ij phi_ij over rows/columns/diagonal; the per-channel
// contraction with dV/du (on both coordinates) and dg/du (diagonal) reuses
// these sums.
struct OverlapSums {
  cvec rowcol;  // r_i + c_i
  cvec diag;    // M_ii
};

void overlap_sums(const cvec& chi, const cvec& phi, int n, OverlapSums& s) {
  s.rowcol.assign(n, complex{0.0, 0.0});
  s.diag.resize(n);
  for (int i1 = 0; i1 < n; ++i1) {
    const complex* c = chi.data() + static_cast<std::size_t>(i1) * n;
    const complex* p = phi.data() + static_cast<std::size_t>(i1) * n;
    complex row{0.0, 0.0};
    for (int i2 = 0; i2 < n; ++i2) {
      const complex m = std::conj(c[i2]) * p[i2];
      row += m;
      s.rowcol[i2] += m;  // column sums
      if (i2 == i1) s.diag[i1] = m;
    }
    s.rowcol[i1] += row;
  }
}

// dV/du and dg/du per 1D grid point, in scaled control units.
struct ChannelDerivs {
  std::vector<double> dv[kChannels];
  std::vector<double> dg[kChannels];
};

void channel_derivs(const Grid1D& grid, const ControlPoint& u,
                    const LatticeParams& p, const ControlScaling& s,
                    ChannelDerivs& d) {
  const int n = grid.n;
  for (int ch = 0; ch < kChannels; ++ch) {
    d.dv[ch].resize(n);
    d.dg[ch].resize(n);
  }
  for (int i = 0; i < n; ++i) {
    const double x = grid.points[i];
    const auto pg = lattice_potential_gradients(x, u.beta, u.theta, u.v0, p);
    const auto cg = coupling_g1d_gradients(x, u.beta, u.theta, u.v0, p);
    d.dv[0][i] = pg.d_beta * s.beta_scale;
    d.dv[1][i] = pg.d_theta * s.theta_scale;
    d.dv[2][i] = pg.d_v0 * s.v0_scale();
    d.dg[0][i] = cg.d_beta * s.beta_scale / grid.dx;
    d.dg[1][i] = cg.d_theta * s.theta_scale / grid.dx;
    d.dg[2][i] = cg.d_v0 * s.v0_scale() / grid.dx;
  }
}

void contract(const OverlapSums& s, const ChannelDerivs& d, double weight,
              complex out[kChannels]) {
  const int n = static_cast<int>(s.diag.size());
  for (int ch = 0; ch < kChannels; ++ch) {
    complex acc{0.0, 0.0};
    for (int i = 0; i < n; ++i) {
      acc += d.dv[ch][i] * s.rowcol[i] + d.dg[ch][i] * s.diag[i];
    }
    out[ch] = acc * weight;
  }
}

double penalty(double u, const ControlBounds& b) {
  if (u < b.lo) return (u - b.lo) * (u - b.lo);
  if (u > b.hi) return (u - b.hi) * (u - b.hi);
  return 0.0;
}

double penalty_deriv(double u, const ControlBounds& b) {
  if (u < b.lo) return 2.0 * (u - b.lo);
  if (u > b.hi) return 2.0 * (u - b.hi);
  return 0.0;
}

// Shared forward/backward engine; `grad` may be null (cost only).
CostParts cost_impl(const ControlSet& controls,
                    const OptimizationProblem& problem,
                    const StageWorkspace& ws, std::vector<double>* grad) {
  const std::size_t n_steps = controls.steps();
  const std::size_t m = controls.samples();
  const double dt = controls.dt;
  const int n = ws.grid1.n;

  Stepper st(ws.grid1, 2, dt, problem.lattice, problem.absorber);

  const std::size_t chunk =
      grad ? std::max<std::size_t>(
                 1, static_cast<std::size_t>(
                        std::ceil(std::sqrt(static_cast<double>(n_steps)))))
           : n_steps + 1;
  std::vector<cvec> ckpt;

  Wavefunction phi = ws.initial;
  for (std::size_t k = 0; k < n_steps; ++k) {
    if (grad && k % chunk == 0) ckpt.push_back(phi.amp);
    st.set_step_controls(step_midpoint(controls, k));
    st.forward(phi.amp);
  }

  const complex c = inner_product(ws.target, phi);

  CostParts parts;
  parts.fidelity = std::norm(c);
  if (problem.kind == ProblemKind::merge) {
    parts.merge_pop =
        merge_population(phi, ws.merged.pair_plus, ws.merged.pair_minus);
  } else {
    parts.merge_pop =
        merge_population(phi, ws.separated.pair_plus, ws.separated.pair_minus);
  }
  parts.j_f = 0.5 * (1.0 - parts.fidelity);

  const auto& weights = problem.weights;
  for (int ch = 0; ch < kChannels; ++ch) {
    const auto& u = channel(controls, ch);
    const ControlBounds b = channel_bounds(weights, ch);
    for (std::size_t j = 0; j + 1 < m; ++j) {
      const double du = u[j + 1] - u[j];
      parts.j_gamma += 0.5 * weights.gamma * du * du / dt;
    }
    for (std::size_t j = 0; j < m; ++j) {
      const double w = (j == 0 || j + 1 == m) ? 0.5 * dt : dt;
      parts.j_sigma += 0.5 * weights.sigma * w * penalty(u[j], b);
    }
  }
  parts.total = parts.j_f + parts.j_gamma + parts.j_sigma;
  if (!grad) return parts;

  // Backward costate sweep over checkpointed segments; the costate step is
  // the exact adjoint of the forward split step, so the gradient matches the
  // discrete cost to machine precision.
  grad->assign(kChannels * m, 0.0);
  std::vector<std::vector<double>> gmid(kChannels,
                                        std::vector<double>(n_steps, 0.0));
  Wavefunction chi = ws.target;
  Wavefunction work = make_wavefunction(ws.grid1, 2);
  std::vector<cvec> seg(chunk + 1);
  OverlapSums sums;
  ChannelDerivs derivs;
  const double weight = ws.initial.cell();
  const complex pref = std::conj(c) * complex{0.0, -0.5 * dt};

  const std::size_t n_seg = ckpt.size();
  for (std::size_t s = n_seg; s-- > 0;) {
    const std::size_t n0 = s * chunk;
    const std::size_t n1 = std::min(n0 + chunk, n_steps);
    seg[0] = ckpt[s];
    work.amp = ckpt[s];
    for (std::size_t k = n0; k < n1; ++k) {
      st.set_step_controls(step_midpoint(controls, k));
      st.forward(work.amp);
      seg[k - n0 + 1] = work.amp;
    }
    for (std::size_t k = n1; k-- > n0;) {
      const ControlPoint u = step_midpoint(controls, k);
      channel_derivs(ws.grid1, u, problem.lattice, controls.scaling, derivs);
      complex term_a[kChannels], term_b[kChannels];
      overlap_sums(chi.amp, seg[k - n0 + 1], n, sums);
      contract(sums, derivs, weight, term_a);
      st.set_step_controls(u);
      st.adjoint(chi.amp);
      overlap_sums(chi.amp, seg[k - n0], n, sums);
      contract(sums, derivs, weight, term_b);
      for (int ch = 0; ch < kChannels; ++ch) {
        gmid[ch][k] = -(pref * (term_a[ch] + term_b[ch])).real();
      }
    }
  }

  for (int ch = 0; ch < kChannels; ++ch) {
    const auto& u = channel(controls, ch);
    const ControlBounds b = channel_bounds(weights, ch);
    double* g = grad->data() + static_cast<std::size_t>(ch) * m;
    for (std::size_t j = 1; j + 1 < m; ++j) {
      g[j] = 0.5 * (gmid[ch][j - 1] + gmid[ch][j]);
      g[j] += weights.gamma * ((u[j] - u[j - 1]) - (u[j + 1] - u[j])) / dt;
      g[j] += 0.5 * weights.sigma * dt * penalty_deriv(u[j], b);
    }
    // endpoints are fixed by the problem definition
    g[0] = 0.0;
    g[m - 1] = 0.0;
  }
  return parts;
}

ControlSet time_scaled(const ControlSet& c, double new_duration) {
  ControlSet out = c;
  out.dt = new_duration / static_cast<double>(c.steps());
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::vector<GridStage> default_cascade(ProblemKind kind) {
  std::vector<GridStage> cascade{
      {32, 5e-4, false, 0}, {64, 1e-4, false, 0}, {64, 1.2e-5, false, 0}};
  if (kind == ProblemKind::full_gate) cascade[2].evaluate_only = true;
  return cascade;
}

StageWorkspace::StageWorkspace(const OptimizationProblem& problem, int n) {
  const double half = problem.lattice.padded_half_width();
  grid1 = make_grid_1d(n, -half, half);
  grid2 = Grid2D{grid1};
  separated =
      make_separated_basis(grid2, separated_point(problem.scaling),
                           problem.lattice);
  merged =
      make_merged_basis(grid2, merged_point(problem.scaling), problem.lattice);

  const auto& lg = separated.one_particle[0];
  const auto& rg = separated.one_particle[1];
  initial = product_state(lg.psi, rg.psi);

  const bool is_merge = problem.kind == ProblemKind::merge;
  const auto& pair_p = is_merge ? merged.pair_plus : separated.pair_plus;
  const auto& pair_m = is_merge ? merged.pair_minus : separated.pair_minus;
  const complex phase =
      is_merge ? std::exp(complex{0.0, problem.alpha_target}) : complex{0.0, 1.0};
  target = make_wavefunction(grid1, 2);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (std::size_t i = 0; i < target.amp.size(); ++i) {
    target.amp[i] =
        (pair_p.psi.amp[i] + phase * pair_m.psi.amp[i]) * inv_sqrt2;
  }
  normalize(target);
}

CostParts cost(const ControlSet& controls, const OptimizationProblem& problem,
               const StageWorkspace& ws) {
  return cost_impl(controls, problem, ws, nullptr);
}

CostParts cost_and_gradient(const ControlSet& controls,
                            const OptimizationProblem& problem,
                            const StageWorkspace& ws,
                            std::vector<double>& grad) {
  return cost_impl(controls, problem, ws, &grad);
}

RunRecord optimize(const ControlSet& seed, const OptimizationProblem& problem,
                   const StageWorkspace& ws, int max_iter_override) {
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };
  const bool is_merge = problem.kind == ProblemKind::merge;
  const double threshold = problem.stopping.fidelity_threshold;

  RunRecord rec;
  rec.kind = problem.kind;
  rec.control = seed;

  auto metric_of = [&](const CostParts& p) {
    return is_merge ? p.merge_pop : p.fidelity;
  };
  auto record_iteration = [&](int iter, const CostParts& p, double gnorm) {
    rec.iterations.push_back({iter, p.total, p.j_f, p.j_gamma, p.j_sigma,
                              gnorm, p.fidelity, p.merge_pop});
  };

  CostParts initial_parts = cost(seed, problem, ws);
  if (metric_of(initial_parts) >= threshold) {
    record_iteration(0, initial_parts, 0.0);
    rec.fidelity = initial_parts.fidelity;
    rec.merge_pop = initial_parts.merge_pop;
    rec.reason = "threshold met";
    rec.converged = true;
    rec.wall_time_s = elapsed();
    return rec;
  }

  ControlSet current = seed;
  CostParts last_parts;
  Objective objective = [&](const std::vector<double>& x,
                            std::vector<double>& g) {
    unpack(x, current);
    last_parts = cost_and_gradient(current, problem, ws, g);
    return last_parts.total;
  };

  std::string stop_reason;
  IterCallback callback = [&](int iter, const std::vector<double>&, double,
                              double gnorm) {
    record_iteration(iter, last_parts, gnorm);
    if (metric_of(last_parts) >= threshold) {
      stop_reason = "threshold met";
      return true;
    }
    if (elapsed() > problem.stopping.wall_time_s) {
      stop_reason = "wall time";
      return true;
    }
    return false;
  };

  LbfgsOptions opts;
  opts.max_iter = max_iter_override > 0 ? max_iter_override
                                        : problem.stopping.max_iter;
  opts.grad_tol = problem.stopping.grad_tol;

  std::vector<double> x = pack(seed);
  const LbfgsReport report = lbfgs_minimize(objective, x, opts, callback);

  unpack(x, current);
  rec.control = current;
  rec.fidelity = last_parts.fidelity;
  rec.merge_pop = last_parts.merge_pop;
  rec.reason = report.reason == "callback" ? stop_reason : report.reason;
  rec.converged = rec.reason == "threshold met";
  rec.wall_time_s = elapsed();
  return rec;
}

const StageWorkspace& WorkspaceCache::get(const OptimizationProblem& problem,
                                          int n) {
  auto it = by_n.find(n);
  if (it == by_n.end()) {
    it = by_n.emplace(n, std::make_shared<const StageWorkspace>(problem, n))
             .first;
  }
  return *it->second;
}

RunRecord cascade_optimize(const ControlSet& seed,
                           const OptimizationProblem& problem,
                           WorkspaceCache* cache) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<GridStage> cascade =
      problem.cascade.empty() ? default_cascade(problem.kind) : problem.cascade;
  if (cascade.empty()) throw std::invalid_argument("cascade must be non-empty");

  WorkspaceCache local;
  WorkspaceCache& wc = cache ? *cache : local;

  RunRecord rec;
  rec.kind = problem.kind;
  rec.grids = cascade;

  ControlSet current = seed;
  int iter_offset = 0;
  for (const GridStage& stage : cascade) {
    if (std::abs(current.dt - stage.dt) > 1e-15) {
      current = current.resampled(stage.dt);
    }
    const StageWorkspace& ws = wc.get(problem, stage.n);
    if (stage.evaluate_only) {
      const CostParts parts = cost(current, problem, ws);
      rec.fidelity = parts.fidelity;
      rec.merge_pop = parts.merge_pop;
      rec.iterations.push_back({iter_offset, parts.total, parts.j_f,
                                parts.j_gamma, parts.j_sigma, 0.0,
                                parts.fidelity, parts.merge_pop});
      ++iter_offset;
      continue;
    }
    RunRecord stage_rec = optimize(current, problem, ws, stage.max_iter);
    for (auto it : stage_rec.iterations) {
      it.iter += iter_offset;
      rec.iterations.push_back(it);
    }
    iter_offset += static_cast<int>(stage_rec.iterations.size());
    current = stage_rec.control;
    rec.fidelity = stage_rec.fidelity;
    rec.merge_pop = stage_rec.merge_pop;
    rec.reason = stage_rec.reason;
    rec.converged = stage_rec.converged;
  }
  rec.control = current;

  // Final relative phase between the exchange pair components.
  try {
    const StageWorkspace& ws = wc.get(problem, cascade.back().n);
    PropagationConfig cfg;
    cfg.dt = current.dt;
    cfg.absorber = problem.absorber;
    const Trajectory traj =
        split_step_2p(ws.initial, current, cfg, problem.lattice);
    const auto& basis =
        problem.kind == ProblemKind::merge ? ws.merged : ws.separated;
    rec.alpha = relative_phase(traj.final_state(), basis.pair_plus,
                               basis.pair_minus);
  } catch (const std::exception&) {
    rec.alpha = std::numeric_limits<double>::quiet_NaN();
  }

  rec.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rec;
}

ControlSet generate_seed(const ControlSet& reference, int m_sines,
                         double amplitude, std::uint64_t rng_seed) {
  ControlSet out = reference;
  if (amplitude == 0.0) return out;
  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> gauss;
  const std::size_t samples = reference.samples();
  const double T = reference.duration();
  std::vector<double> pert(samples);
  for (int ch = 0; ch < kChannels; ++ch) {
    std::vector<double> coeff(static_cast<std::size_t>(m_sines));
    for (int m = 0; m < m_sines; ++m) {
      coeff[static_cast<std::size_t>(m)] = gauss(rng) / static_cast<double>(m + 1);
    }
    double peak = 0.0;
    for (std::size_t j = 0; j < samples; ++j) {
      const double t = static_cast<double>(j) * reference.dt;
      double p = 0.0;
      for (int m = 0; m < m_sines; ++m) {
        p += coeff[static_cast<std::size_t>(m)] *
             std::sin((m + 1) * kPi * t / T);
      }
      pert[j] = p;
      peak = std::max(peak, std::abs(p));
    }
    if (peak == 0.0) continue;
    const double scale = amplitude / peak;
    auto& u = channel(out, ch);
    for (std::size_t j = 1; j + 1 < samples; ++j) {
      u[j] += scale * pert[j];
    }
    // endpoints untouched: sin(m pi 0/T) = sin(m pi T/T) = 0
  }
  return out;
}

ExtensionResult extend_to_full_gate(const ControlSet& merge_control,
                                    const OptimizationProblem& problem) {
  ExtensionResult res;
  const int n = problem.cascade.empty() ? default_cascade(problem.kind).back().n
                                        : problem.cascade.back().n;
  StageWorkspace ws(problem, n);

  PropagationConfig cfg;
  cfg.dt = merge_control.dt;
  cfg.absorber = problem.absorber;
  const Trajectory traj =
      split_step_2p(ws.initial, merge_control, cfg, problem.lattice);
  res.alpha = relative_phase(traj.final_state(), ws.merged.pair_plus,
                             ws.merged.pair_minus);
  res.exchange_u = ws.merged.pair_splitting;
  if (res.alpha >= kPi / 4.0) {
    res.accepted = false;
    return res;
  }
  res.wait = (kPi / 2.0 - 2.0 * res.alpha) / res.exchange_u;
  const auto hold_steps =
      static_cast<std::size_t>(std::llround(res.wait / merge_control.dt));
  res.control = concat_hold_reverse(merge_control, hold_steps);
  res.accepted = true;
  return res;
}

BatchResult multistart(const OptimizationProblem& problem_template,
                       const MultistartOptions& options) {
  BatchResult batch;
  WorkspaceCache cache;
  const std::vector<GridStage> cascade = problem_template.cascade.empty()
                                             ? default_cascade(problem_template.kind)
                                             : problem_template.cascade;
  const double coarse_dt = cascade.front().dt;

  int seed_id = 0;
  for (std::size_t ti = 0; ti < options.durations.size(); ++ti) {
    const double T = options.durations[ti];
    OptimizationProblem problem = problem_template;
    problem.duration = T;
    problem.cascade = cascade;

    BatchSummaryRow row;
    row.duration = T;
    for (int s = 0; s < options.seeds_per_duration; ++s) {
      const std::uint64_t run_seed =
          splitmix64(options.master_seed ^ (ti * 1000003ULL + static_cast<std::uint64_t>(s) + 1ULL));
      ControlSet reference;
      if (problem.kind == ProblemKind::merge) {
        reference = linear_merge_control(T, coarse_dt, problem.scaling);
      } else {
        if (options.reference_pool.empty()) {
          throw std::invalid_argument(
              "full-gate multistart needs a reference pool of extended merge controls");
        }
        const ControlSet& base = options.reference_pool[static_cast<std::size_t>(s) %
                                                        options.reference_pool.size()];
        reference = time_scaled(base, T).resampled(coarse_dt);
      }
      const int m_sines =
          options.m_min +
          static_cast<int>(run_seed % static_cast<std::uint64_t>(
                                          options.m_max - options.m_min + 1));
      // first seed per duration starts from the unperturbed reference
      const double amp = s == 0 ? 0.0 : options.seed_amplitude;
      ControlSet seed = generate_seed(reference, m_sines, amp, run_seed);

      RunRecord rec;
      try {
        rec = cascade_optimize(seed, problem, &cache);
      } catch (const std::exception& e) {
        rec.reason = std::string("error: ") + e.what();
        rec.converged = false;
      }
      rec.seed_id = seed_id++;
      rec.rng_seed = run_seed;

      row.n_seeds += 1;
      if (rec.converged) row.n_converged += 1;
      row.best_one_minus_f = std::min(row.best_one_minus_f, 1.0 - rec.fidelity);
      row.best_one_minus_fprime =
          std::min(row.best_one_minus_fprime, 1.0 - rec.merge_pop);
      batch.runs.push_back(std::move(rec));
    }
    batch.summary.push_back(row);
  }
  return batch;
}

std::vector<BatchSummaryRow> monotone_best(
    const std::vector<BatchSummaryRow>& rows) {
  std::vector<BatchSummaryRow> out = rows;
  std::sort(out.begin(), out.end(),
            [](const BatchSummaryRow& a, const BatchSummaryRow& b) {
              return a.duration < b.duration;
            });
  double best_f = 1.0, best_fp = 1.0;
  for (auto& r : out) {
    best_f = std::min(best_f, r.best_one_minus_f);
    best_fp = std::min(best_fp, r.best_one_minus_fprime);
    r.best_one_minus_f = best_f;
    r.best_one_minus_fprime = best_fp;
  }
  return out;
}

void save_batch_summary(const std::vector<BatchSummaryRow>& rows,
                        const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << "T,best_one_minus_F,best_one_minus_Fprime,n_seeds,n_converged\n";
  char buf[200];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%d,%d\n", r.duration,
                  r.best_one_minus_f, r.best_one_minus_fprime, r.n_seeds,
                  r.n_converged);
    f << buf;
  }
}

void RunRecord::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  char buf[256];
  f << "# swapqoc run record\n";
  f << "problem = " << (kind == ProblemKind::merge ? "merge" : "full_gate")
    << "\n";
  f << "seed_id = " << seed_id << "\n";
  f << "rng_seed = " << rng_seed << "\n";
  std::snprintf(buf, sizeof(buf), "duration_ms = %.17g\n", control.duration());
  f << buf;
  std::snprintf(buf, sizeof(buf),
                "fidelity = %.17g\nmerge_population = %.17g\nalpha = %.17g\n",
                fidelity, merge_pop, alpha);
  f << buf;
  f << "reason = " << reason << "\n";
  f << "converged = " << (converged ? 1 : 0) << "\n";
  std::snprintf(buf, sizeof(buf), "wall_time_s = %.3f\n", wall_time_s);
  f << buf;
  f << "grids = ";
  for (std::size_t i = 0; i < grids.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%s%d:%g%s", i ? "," : "", grids[i].n,
                  grids[i].dt, grids[i].evaluate_only ? ":eval" : "");
    f << buf;
  }
  f << "\n\n[iterations]\n";
  f << "iter,J,J_F,J_gamma,J_sigma,grad_norm,F,Fprime\n";
  for (const auto& it : iterations) {
    std::snprintf(buf, sizeof(buf),
                  "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", it.iter,
                  it.j, it.j_f, it.j_gamma, it.j_sigma, it.grad_norm,
                  it.fidelity, it.merge_pop);
    f << buf;
  }
  f << "\n[control]\n";
  f << "t,beta,theta,v0\n";
  for (std::size_t j = 0; j < control.samples(); ++j) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n",
                  static_cast<double>(j) * control.dt, control.beta[j],
                  control.theta[j], control.v0[j]);
    f << buf;
  }
}

}  // namespace swq
