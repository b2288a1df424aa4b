#ifndef SWAPQOC_CONFIG_HPP
#define SWAPQOC_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "swapqoc/grape.hpp"

namespace swq {

// Fully resolved run configuration; every field has a usable default so an
// empty config file is valid.
struct RunConfig {
  std::string problem = "merge";  // merge | full_gate
  LatticeParams lattice;
  ControlScaling scaling;
  CostWeights weights;
  StoppingRules stopping;
  std::vector<GridStage> cascade;  // empty: default cascade for the problem
  std::vector<double> durations{0.12};
  int seeds = 20;
  std::uint64_t rng = 1;
  double alpha_target = 0.33;
  double seed_amplitude = 0.15;
  int m_min = 40, m_max = 60;
  std::string out_dir = "runs";
  AbsorberParams absorber;
  double dt = 1.2e-5;  // single-trajectory commands
  int grid_n = 64;

  ProblemKind kind() const;
  OptimizationProblem problem_for(double duration) const;
};

// Flat `key = value` text with optional [section] headers that prefix the
// keys ("section.key"). '#' starts a comment. Unknown keys and malformed
// values are errors naming the line.
RunConfig parse_config_text(const std::string& text, const std::string& origin);
RunConfig load_config(const std::string& path);

// Apply one dotted key ("lattice.site_a") to an existing config.
void apply_config_value(RunConfig& config, const std::string& key,
                        const std::string& value);

// SWAPQOC_* environment overrides ("__" separates sections, case-insensitive:
// SWAPQOC_LATTICE__SITE_A overrides lattice.site_a).
void apply_env_overrides(RunConfig& config);

// Canonical echo of all resolved values, itself a loadable config.
std::string resolved_config(const RunConfig& config);

}  // namespace swq

#endif
