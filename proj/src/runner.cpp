#include "swapqoc/runner.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "swapqoc/config.hpp"
#include "swapqoc/exchange.hpp"
#include "swapqoc/grape.hpp"

namespace fs = std::filesystem;

namespace swq {

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string control_path;
  std::string problem;
  std::vector<double> durations;
  int seeds = -1;
  long long rng = -1;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "configuration file");
  cmd->add_option("--out", flags.out_dir, "output directory");
  cmd->add_option("--control", flags.control_path, "control CSV file");
  cmd->add_option("--problem", flags.problem, "merge | full_gate");
  cmd->add_option("--T", flags.durations, "duration(s) in ms");
  cmd->add_option("--seeds", flags.seeds, "seeds per duration");
  cmd->add_option("--rng", flags.rng, "master rng seed");
}

RunConfig resolve(const CommonFlags& flags) {
  RunConfig config =
      flags.config_path.empty() ? RunConfig{} : load_config(flags.config_path);
  apply_env_overrides(config);
  if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
  if (!flags.problem.empty()) {
    if (flags.problem != "merge" && flags.problem != "full_gate") {
      throw std::runtime_error("--problem must be merge or full_gate");
    }
    config.problem = flags.problem;
  }
  if (!flags.durations.empty()) config.durations = flags.durations;
  if (flags.seeds >= 0) config.seeds = flags.seeds;
  if (flags.rng >= 0) config.rng = static_cast<std::uint64_t>(flags.rng);
  return config;
}

// Every command leaves the resolved configuration next to its outputs.
fs::path prepare_out(const RunConfig& config) {
  fs::path dir(config.out_dir);
  fs::create_directories(dir);
  std::ofstream f(dir / "config_resolved.txt");
  f << resolved_config(config);
  return dir;
}

ControlSet require_control(const CommonFlags& flags, const RunConfig& config) {
  if (flags.control_path.empty()) {
    throw std::runtime_error("this command requires --control <file.csv>");
  }
  return ControlSet::load_csv(flags.control_path, config.scaling);
}

void write_eigen_row(std::ostream& os, const std::string& configuration,
                     const std::string& kind, int index, const EigenState& st) {
  char buf[200];
  std::snprintf(buf, sizeof(buf), "%s,%s,%d,%s,%d,%.12g\n",
                configuration.c_str(), kind.c_str(), index, st.label.c_str(),
                st.parity, natural_to_khz(st.energy));
  os << buf;
}

int cmd_eigen(const RunConfig& config) {
  const fs::path dir = prepare_out(config);
  const double half = config.lattice.padded_half_width();
  const Grid1D grid = make_grid_1d(config.grid_n, -half, half);
  const Grid2D grid2{grid};

  std::ofstream csv(dir / "eigen.csv");
  csv << "configuration,kind,index,label,parity,energy_khz\n";

  auto dump = [&](const SpectralBasis& basis) {
    for (std::size_t i = 0; i < basis.one_particle.size(); ++i) {
      write_eigen_row(csv, basis.configuration, "1p", static_cast<int>(i),
                      basis.one_particle[i]);
    }
    for (std::size_t i = 0; i < basis.two_particle.size(); ++i) {
      write_eigen_row(csv, basis.configuration, "2p", static_cast<int>(i),
                      basis.two_particle[i]);
    }
    std::printf("%s: pair splitting E+ - E- = %.6g kHz\n",
                basis.configuration.c_str(),
                natural_to_khz(basis.pair_splitting));
  };

  const SpectralBasis sep = make_separated_basis(
      grid2, separated_point(config.scaling), config.lattice);
  const SpectralBasis mer =
      make_merged_basis(grid2, merged_point(config.scaling), config.lattice);
  dump(sep);
  dump(mer);

  // interaction shift of the doubly-occupied state above the singly-occupied
  // doublet in the separated trap
  const double pair_e =
      0.5 * (sep.pair_plus.energy + sep.pair_minus.energy);
  double shift = 0.0;
  for (const auto& st : sep.two_particle) {
    if (st.energy > pair_e + khz_to_natural(0.5)) {
      shift = st.energy - pair_e;
      break;
    }
  }
  std::printf("separated: doubly-occupied state shifted by %.6g kHz\n",
              natural_to_khz(shift));
  std::printf("wrote %s\n", (dir / "eigen.csv").string().c_str());
  return 0;
}

int cmd_adiabatic(const RunConfig& config) {
  const fs::path dir = prepare_out(config);
  const double T = config.durations.front();
  const double half = config.lattice.padded_half_width();
  const Grid1D grid = make_grid_1d(config.grid_n, -half, half);
  const ControlSet controls = linear_merge_control(T, config.dt, config.scaling);

  const PhaseTrace trace =
      adiabatic_phase(controls, grid, config.lattice,
                      PhaseMode::tracked_eigenstates);
  {
    std::ofstream f(dir / "phase.csv");
    f << "t,U_khz,alpha\n";
    char buf[160];
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g\n", trace.times[i],
                    natural_to_khz(trace.U[i]), trace.alpha[i]);
      f << buf;
    }
  }

  PropagationConfig cfg;
  cfg.dt = config.dt;
  cfg.absorber = config.absorber;
  cfg.store_stride =
      std::max<int>(1, static_cast<int>(controls.steps()) / 50);
  const auto [ta, tb] =
      independent_densities(controls, grid, config.lattice, cfg);
  {
    std::ofstream f(dir / "density.csv");
    f << "t,x,rho_a,rho_b\n";
    char buf[200];
    for (std::size_t s = 0; s < ta.snapshots.size(); ++s) {
      for (int i = 0; i < grid.n; ++i) {
        std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g\n",
                      ta.times[s], grid.points[i],
                      std::norm(ta.snapshots[s].amp[i]),
                      std::norm(tb.snapshots[s].amp[i]));
        f << buf;
      }
    }
  }

  const double alpha_final = trace.alpha.back();
  const double u_final = trace.U.back();
  std::printf("T = %g ms: alpha(T) = %.6g rad, U(T) = %.6g kHz\n", T,
              alpha_final, natural_to_khz(u_final));
  if (u_final > 0.0 && alpha_final < kPi / 2.0) {
    std::printf("static hold to sqrt(SWAP): %.6g ms\n",
                (kPi / 2.0 - alpha_final) / u_final);
  }
  std::printf("wrote %s and %s\n", (dir / "phase.csv").string().c_str(),
              (dir / "density.csv").string().c_str());
  return 0;
}

int cmd_propagate(const CommonFlags& flags, const RunConfig& config) {
  const fs::path dir = prepare_out(config);
  const ControlSet controls = require_control(flags, config);
  const OptimizationProblem problem =
      config.problem_for(controls.duration());
  const StageWorkspace ws(problem, config.grid_n);

  PropagationConfig cfg;
  cfg.dt = controls.dt;
  cfg.absorber = config.absorber;
  const Trajectory traj =
      split_step_2p(ws.initial, controls, cfg, config.lattice);

  const auto& basis =
      problem.kind == ProblemKind::merge ? ws.merged : ws.separated;
  const Wavefunction& final_state = traj.final_state();
  const double f = fidelity(final_state, ws.target);
  const double fp =
      merge_population(final_state, basis.pair_plus, basis.pair_minus);
  double alpha = std::numeric_limits<double>::quiet_NaN();
  try {
    alpha = relative_phase(final_state, basis.pair_plus, basis.pair_minus);
  } catch (const std::exception&) {
  }

  std::ofstream f_out(dir / "propagate.txt");
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "T = %.12g\nF = %.12g\nFprime = %.12g\nalpha = %.12g\n"
                "final_norm = %.12g\n",
                controls.duration(), f, fp, alpha, traj.norms.back());
  f_out << buf;
  std::printf("%s", buf);
  return 0;
}

void save_batch(const BatchResult& batch, const fs::path& dir) {
  const RunRecord* best = nullptr;
  for (const auto& rec : batch.runs) {
    char name[64];
    std::snprintf(name, sizeof(name), "run_%04d.txt", rec.seed_id);
    rec.save((dir / name).string());
    if (rec.control.samples() == 0) continue;
    const bool better =
        !best || (rec.kind == ProblemKind::merge
                      ? rec.merge_pop > best->merge_pop
                      : rec.fidelity > best->fidelity);
    if (better) best = &rec;
  }
  if (best) {
    best->control.save_csv((dir / "best_control.csv").string());
  }
  save_batch_summary(batch.summary, (dir / "summary.csv").string());
  save_batch_summary(monotone_best(batch.summary),
                     (dir / "summary_monotone.csv").string());
}

void print_summary(const BatchResult& batch) {
  for (const auto& row : batch.summary) {
    std::printf(
        "T = %g ms: best 1-F = %.4g, best 1-F' = %.4g, converged %d/%d\n",
        row.duration, row.best_one_minus_f, row.best_one_minus_fprime,
        row.n_converged, row.n_seeds);
  }
}

int cmd_optimize_merge(const RunConfig& config) {
  RunConfig merged_config = config;
  merged_config.problem = "merge";
  const fs::path dir = prepare_out(merged_config);
  MultistartOptions options;
  options.durations = merged_config.durations;
  options.seeds_per_duration = merged_config.seeds;
  options.master_seed = merged_config.rng;
  options.seed_amplitude = merged_config.seed_amplitude;
  options.m_min = merged_config.m_min;
  options.m_max = merged_config.m_max;

  const BatchResult batch =
      multistart(merged_config.problem_for(options.durations.front()), options);
  save_batch(batch, dir);
  print_summary(batch);
  return 0;
}

int cmd_optimize_full(const CommonFlags& flags, const RunConfig& config) {
  RunConfig full_config = config;
  full_config.problem = "full_gate";
  const fs::path dir = prepare_out(full_config);

  RunConfig merge_config = config;
  merge_config.problem = "merge";
  const ControlSet merge_control = require_control(flags, merge_config);
  const ExtensionResult ext = extend_to_full_gate(
      merge_control, merge_config.problem_for(merge_control.duration()));
  if (!ext.accepted) {
    std::fprintf(stderr,
                 "merge control rejected: alpha = %.6g >= pi/4, no "
                 "non-negative wait exists\n",
                 ext.alpha);
    return 1;
  }
  ext.control.save_csv((dir / "extended_control.csv").string());

  MultistartOptions options;
  options.durations = full_config.durations;
  // default to the extended duration when the user gave none beyond defaults
  if (flags.durations.empty()) {
    options.durations = {ext.control.duration()};
  }
  options.seeds_per_duration = full_config.seeds;
  options.master_seed = full_config.rng;
  options.seed_amplitude = full_config.seed_amplitude;
  options.m_min = full_config.m_min;
  options.m_max = full_config.m_max;
  options.reference_pool = {ext.control};

  const BatchResult batch = multistart(
      full_config.problem_for(options.durations.front()), options);
  save_batch(batch, dir);
  print_summary(batch);
  return 0;
}

int cmd_extend(const CommonFlags& flags, const RunConfig& config) {
  RunConfig merge_config = config;
  merge_config.problem = "merge";
  const fs::path dir = prepare_out(merge_config);
  const ControlSet merge_control = require_control(flags, merge_config);
  const ExtensionResult ext = extend_to_full_gate(
      merge_control, merge_config.problem_for(merge_control.duration()));

  std::ofstream f(dir / "extend.txt");
  char buf[300];
  std::snprintf(buf, sizeof(buf),
                "accepted = %d\nalpha = %.12g\nU_khz = %.12g\nwait_ms = "
                "%.12g\nT_full_ms = %.12g\n",
                ext.accepted ? 1 : 0, ext.alpha, natural_to_khz(ext.exchange_u),
                ext.accepted ? ext.wait : 0.0,
                ext.accepted ? ext.control.duration() : 0.0);
  f << buf;
  std::printf("%s", buf);
  if (!ext.accepted) {
    std::fprintf(stderr, "alpha >= pi/4: extension rejected\n");
    return 1;
  }
  ext.control.save_csv((dir / "extended_control.csv").string());
  std::printf("wrote %s\n", (dir / "extended_control.csv").string().c_str());
  return 0;
}

int cmd_evaluate(const CommonFlags& flags, const RunConfig& config) {
  const fs::path dir = prepare_out(config);
  ControlSet controls = require_control(flags, config);
  const OptimizationProblem problem =
      config.problem_for(controls.duration());
  const auto cascade =
      problem.cascade.empty() ? default_cascade(problem.kind) : problem.cascade;
  const GridStage& fine = cascade.back();
  if (std::abs(controls.dt - fine.dt) > 1e-15) {
    controls = controls.resampled(fine.dt);
  }
  const StageWorkspace ws(problem, fine.n);
  const CostParts parts = cost(controls, problem, ws);

  double alpha = std::numeric_limits<double>::quiet_NaN();
  try {
    PropagationConfig cfg;
    cfg.dt = controls.dt;
    cfg.absorber = problem.absorber;
    const Trajectory traj =
        split_step_2p(ws.initial, controls, cfg, problem.lattice);
    const auto& basis =
        problem.kind == ProblemKind::merge ? ws.merged : ws.separated;
    alpha = relative_phase(traj.final_state(), basis.pair_plus,
                           basis.pair_minus);
  } catch (const std::exception&) {
  }

  std::ofstream f(dir / "evaluate.txt");
  char buf[300];
  std::snprintf(buf, sizeof(buf),
                "problem,T,F,Fprime,alpha,J,J_F,J_gamma,J_sigma\n"
                "%s,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                config.problem.c_str(), controls.duration(), parts.fidelity,
                parts.merge_pop, alpha, parts.total, parts.j_f, parts.j_gamma,
                parts.j_sigma);
  f << buf;
  std::printf("%s", buf);
  return 0;
}

// Rebuild summary CSVs from the run records in the output directory.
int cmd_batch_summary(const RunConfig& config) {
  const fs::path dir = prepare_out(config);
  struct Acc {
    BatchSummaryRow row;
  };
  std::map<double, BatchSummaryRow> rows;
  bool any = false;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("run_", 0) != 0 || entry.path().extension() != ".txt") {
      continue;
    }
    std::ifstream f(entry.path());
    double duration = -1.0, fidelity = 0.0, fprime = 0.0;
    int converged = 0;
    std::string line;
    while (std::getline(f, line)) {
      if (line.empty() || line[0] == '[') break;
      std::istringstream is(line);
      std::string key, eq;
      double value;
      if ((is >> key >> eq >> value) && eq == "=") {
        if (key == "duration_ms") duration = value;
        if (key == "fidelity") fidelity = value;
        if (key == "merge_population") fprime = value;
        if (key == "converged") converged = static_cast<int>(value);
      }
    }
    if (duration < 0.0) continue;
    any = true;
    auto& row = rows[duration];
    row.duration = duration;
    row.n_seeds += 1;
    row.n_converged += converged;
    row.best_one_minus_f = std::min(row.best_one_minus_f, 1.0 - fidelity);
    row.best_one_minus_fprime =
        std::min(row.best_one_minus_fprime, 1.0 - fprime);
  }
  if (!any) {
    std::fprintf(stderr, "no run_*.txt records found in %s\n",
                 dir.string().c_str());
    return 1;
  }
  std::vector<BatchSummaryRow> summary;
  for (const auto& [t, row] : rows) summary.push_back(row);
  save_batch_summary(summary, (dir / "summary.csv").string());
  save_batch_summary(monotone_best(summary),
                     (dir / "summary_monotone.csv").string());
  std::printf("summarized %zu duration(s) into %s\n", summary.size(),
              (dir / "summary.csv").string().c_str());
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"swapqoc: collisional sqrt(SWAP) gate optimization"};
  app.require_subcommand(1);

  std::map<std::string, CommonFlags> flags;
  const char* names[] = {"eigen",        "adiabatic",     "propagate",
                         "optimize-merge", "optimize-full", "extend",
                         "evaluate",     "batch-summary"};
  const char* descs[] = {
      "static spectra of the separated and merged traps",
      "adiabatic linear merge: U(t), alpha(t) and densities",
      "propagate the two-particle ground pair under a control",
      "multistart GRAPE on the merging sub-problem",
      "multistart GRAPE on the full gate, seeded from an extended merge control",
      "extend a merge control to the full merge-wait-separate gate",
      "evaluate a control: fidelity, transfer population, phase",
      "rebuild batch summary CSVs from run records"};
  for (std::size_t i = 0; i < 8; ++i) {
    auto* cmd = app.add_subcommand(names[i], descs[i]);
    add_common(cmd, flags[names[i]]);
  }

  std::vector<const char*> argv;
  argv.push_back("swapqoc");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  const CommonFlags& f = flags[sub];
  try {
    const RunConfig config = resolve(f);
    if (sub == "eigen") return cmd_eigen(config);
    if (sub == "adiabatic") return cmd_adiabatic(config);
    if (sub == "propagate") return cmd_propagate(f, config);
    if (sub == "optimize-merge") return cmd_optimize_merge(config);
    if (sub == "optimize-full") return cmd_optimize_full(f, config);
    if (sub == "extend") return cmd_extend(f, config);
    if (sub == "evaluate") return cmd_evaluate(f, config);
    if (sub == "batch-summary") return cmd_batch_summary(config);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}

}  // namespace swq
