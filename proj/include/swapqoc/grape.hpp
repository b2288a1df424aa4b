#ifndef SWAPQOC_GRAPE_HPP
#define SWAPQOC_GRAPE_HPP

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "swapqoc/eigensolver.hpp"
#include "swapqoc/grid.hpp"
#include "swapqoc/lattice.hpp"
#include "swapqoc/propagator.hpp"

namespace swq {

enum class ProblemKind { merge, full_gate };

struct ControlBounds {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

struct CostWeights {
  double gamma = 1e-7;  // ramp-smoothness weight
  double sigma = 1e5;   // soft bound weight
  ControlBounds beta;   // unbounded
  ControlBounds theta{0.0, 2.1};
  ControlBounds v0{0.2, 1.15};
};

struct GridStage {
  int n = 64;
  double dt = 1.2e-5;  // ms
  bool evaluate_only = false;
  int max_iter = 0;  // 0: use StoppingRules::max_iter
};

struct StoppingRules {
  double fidelity_threshold = 0.99;  // F' for merge, F for full gate
  double grad_tol = 1e-8;
  int max_iter = 200;
  double wall_time_s = 3600.0;
};

struct OptimizationProblem {
  ProblemKind kind = ProblemKind::merge;
  double duration = 0.12;     // ms
  double alpha_target = 0.33;  // merge target phase
  CostWeights weights;
  std::vector<GridStage> cascade;  // empty: default_cascade(kind)
  StoppingRules stopping;
  LatticeParams lattice;
  ControlScaling scaling;
  AbsorberParams absorber;
};

// Merge: optimize on all three grids. Full gate: optimize on the first two,
// evaluate only on the final grid.
std::vector<GridStage> default_cascade(ProblemKind kind);

struct CostParts {
  double total = 0.0;
  double j_f = 0.0;
  double j_gamma = 0.0;
  double j_sigma = 0.0;
  double fidelity = 0.0;   // F
  double merge_pop = 0.0;  // F'
};

struct IterationRecord {
  int iter = 0;
  double j = 0.0, j_f = 0.0, j_gamma = 0.0, j_sigma = 0.0;
  double grad_norm = 0.0;
  double fidelity = 0.0, merge_pop = 0.0;
};

struct RunRecord {
  int seed_id = 0;
  std::uint64_t rng_seed = 0;
  ProblemKind kind = ProblemKind::merge;
  std::vector<IterationRecord> iterations;
  ControlSet control;  // final control on the last grid
  double fidelity = 0.0;
  double merge_pop = 0.0;
  double alpha = 0.0;  // relative phase at T (merge problems)
  std::vector<GridStage> grids;
  double wall_time_s = 0.0;
  std::string reason;
  bool converged = false;

  void save(const std::string& path) const;
};

// Grid-dependent state shared by all cost evaluations on one stage: the
// separated/merged spectral bases, the initial product state and the target.
struct StageWorkspace {
  Grid1D grid1;
  Grid2D grid2;
  SpectralBasis separated;
  SpectralBasis merged;
  Wavefunction initial;
  Wavefunction target;

  StageWorkspace(const OptimizationProblem& problem, int n);
};

CostParts cost(const ControlSet& controls, const OptimizationProblem& problem,
               const StageWorkspace& ws);

// Exact gradient of the discrete cost via backward costate propagation with
// sqrt(N) checkpointing. Layout of `grad`: beta samples, then theta, then v0;
// fixed endpoints are zeroed.
CostParts cost_and_gradient(const ControlSet& controls,
                            const OptimizationProblem& problem,
                            const StageWorkspace& ws,
                            std::vector<double>& grad);

RunRecord optimize(const ControlSet& seed, const OptimizationProblem& problem,
                   const StageWorkspace& ws, int max_iter_override = 0);

// Workspaces depend only on the grid size (for a fixed problem); batches
// reuse them across runs to avoid re-diagonalizing per seed.
struct WorkspaceCache {
  std::map<int, std::shared_ptr<const StageWorkspace>> by_n;
  const StageWorkspace& get(const OptimizationProblem& problem, int n);
};

// Sequential optimization over problem.cascade with linear control
// interpolation between stages.
RunRecord cascade_optimize(const ControlSet& seed,
                           const OptimizationProblem& problem,
                           WorkspaceCache* cache = nullptr);

// reference + A * sum_m c_m sin(m pi t / T), c_m random with 1/m weighting,
// the perturbation peak-normalized to `amplitude` per channel. Endpoints are
// preserved exactly.
ControlSet generate_seed(const ControlSet& reference, int m_sines,
                         double amplitude, std::uint64_t rng_seed);

struct ExtensionResult {
  bool accepted = false;
  double alpha = 0.0;       // relative phase after the merge segment
  double exchange_u = 0.0;  // merged-pair splitting used for the hold
  double wait = 0.0;        // ms
  ControlSet control;       // merge + hold + time-reversed merge
};

// Rejects (accepted = false) when alpha >= pi/4, i.e. the wait would be
// negative.
ExtensionResult extend_to_full_gate(const ControlSet& merge_control,
                                    const OptimizationProblem& problem);

struct MultistartOptions {
  std::vector<double> durations;  // ms
  int seeds_per_duration = 20;
  std::uint64_t master_seed = 1;
  double seed_amplitude = 0.15;
  int m_min = 40, m_max = 60;
  // Full-gate batches draw their references from this pool (extended merge
  // optima, possibly time-compressed); merge batches use the linear ramp.
  std::vector<ControlSet> reference_pool;
};

struct BatchSummaryRow {
  double duration = 0.0;
  double best_one_minus_f = 1.0;
  double best_one_minus_fprime = 1.0;
  int n_seeds = 0;
  int n_converged = 0;
};

struct BatchResult {
  std::vector<RunRecord> runs;
  std::vector<BatchSummaryRow> summary;  // one row per duration
};

BatchResult multistart(const OptimizationProblem& problem_template,
                       const MultistartOptions& options);

// Enforce best-so-far monotonicity over increasing duration.
std::vector<BatchSummaryRow> monotone_best(
    const std::vector<BatchSummaryRow>& rows);

void save_batch_summary(const std::vector<BatchSummaryRow>& rows,
                        const std::string& path);

}  // namespace swq

#endif
