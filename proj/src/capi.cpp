#include "swapqoc/capi.h"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "swapqoc/config.hpp"
#include "swapqoc/exchange.hpp"
#include "swapqoc/grape.hpp"
#include "swapqoc/runner.hpp"

struct swq_config {
  swq::RunConfig config;
};

namespace {

thread_local std::string g_last_error;

int set_error(int code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const std::runtime_error& e) {
    const std::string what = e.what();
    const bool io = what.find("cannot open") != std::string::npos;
    return set_error(io ? SWQ_ERR_IO : SWQ_ERR_RUNTIME, what);
  } catch (const std::invalid_argument& e) {
    return set_error(SWQ_ERR_INVALID, e.what());
  } catch (const std::exception& e) {
    return set_error(SWQ_ERR_RUNTIME, e.what());
  }
}

}  // namespace

extern "C" {

const char* swq_version(void) { return "swapqoc 1.0.0"; }

const char* swq_last_error(void) { return g_last_error.c_str(); }

swq_config* swq_config_create(void) { return new swq_config{}; }

int swq_config_load(swq_config* config, const char* path) {
  if (!config || !path) return set_error(SWQ_ERR_INVALID, "null argument");
  return guarded([&] {
    config->config = swq::load_config(path);
    return SWQ_OK;
  });
}

int swq_config_set(swq_config* config, const char* key, const char* value) {
  if (!config || !key || !value) {
    return set_error(SWQ_ERR_INVALID, "null argument");
  }
  return guarded([&] {
    swq::apply_config_value(config->config, key, value);
    return SWQ_OK;
  });
}

void swq_config_free(swq_config* config) { delete config; }

int swq_run(int argc, const char* const* argv) {
  if (argc < 0 || (argc > 0 && !argv)) return 2;
  std::vector<std::string> args(argv, argv + argc);
  try {
    g_last_error.clear();
    return swq::run_command(args);
  } catch (const std::exception& e) {
    set_error(SWQ_ERR_RUNTIME, e.what());
    return 1;
  }
}

int swq_eigen_energies(const swq_config* config, double beta, double theta,
                       double v0, int count, double* out_khz) {
  if (!config || !out_khz || count < 1) {
    return set_error(SWQ_ERR_INVALID, "null argument or count < 1");
  }
  return guarded([&] {
    const swq::RunConfig& c = config->config;
    const double half = c.lattice.padded_half_width();
    const swq::Grid1D grid = swq::make_grid_1d(c.grid_n, -half, half);
    const swq::ControlPoint u =
        swq::scaled_to_physical(beta, theta, v0, c.scaling);
    const auto states =
        swq::single_particle_eigenstates(grid, u, c.lattice, count);
    for (int i = 0; i < count; ++i) {
      out_khz[i] = swq::natural_to_khz(states[static_cast<std::size_t>(i)].energy);
    }
    return SWQ_OK;
  });
}

int swq_evaluate_control(const swq_config* config, const char* control_csv,
                         const char* problem, double out[3]) {
  if (!config || !control_csv || !problem || !out) {
    return set_error(SWQ_ERR_INVALID, "null argument");
  }
  const std::string kind = problem;
  if (kind != "merge" && kind != "full_gate") {
    return set_error(SWQ_ERR_INVALID, "problem must be merge or full_gate");
  }
  return guarded([&] {
    swq::RunConfig c = config->config;
    c.problem = kind;
    const swq::ControlSet controls =
        swq::ControlSet::load_csv(control_csv, c.scaling);
    const swq::OptimizationProblem p = c.problem_for(controls.duration());
    const auto cascade =
        p.cascade.empty() ? swq::default_cascade(p.kind) : p.cascade;
    swq::ControlSet resampled = controls;
    if (std::abs(controls.dt - cascade.back().dt) > 1e-15) {
      resampled = controls.resampled(cascade.back().dt);
    }
    const swq::StageWorkspace ws(p, cascade.back().n);
    const swq::CostParts parts = swq::cost(resampled, p, ws);
    out[0] = parts.fidelity;
    out[1] = parts.merge_pop;
    out[2] = std::numeric_limits<double>::quiet_NaN();
    try {
      swq::PropagationConfig cfg;
      cfg.dt = resampled.dt;
      cfg.absorber = p.absorber;
      const swq::Trajectory traj =
          swq::split_step_2p(ws.initial, resampled, cfg, p.lattice);
      const auto& basis =
          p.kind == swq::ProblemKind::merge ? ws.merged : ws.separated;
      out[2] = swq::relative_phase(traj.final_state(), basis.pair_plus,
                                   basis.pair_minus);
    } catch (const std::exception&) {
    }
    return SWQ_OK;
  });
}

}  // extern "C"
