#ifndef SWAPQOC_LBFGS_HPP
#define SWAPQOC_LBFGS_HPP

#include <functional>
#include <string>
#include <vector>

namespace swq {

// f(x, grad) -> value, writing the gradient into `grad`.
using Objective =
    std::function<double(const std::vector<double>&, std::vector<double>&)>;

// Called after each accepted iterate; return true to stop early.
using IterCallback = std::function<bool(int iter, const std::vector<double>& x,
                                        double f, double grad_norm)>;

struct LbfgsOptions {
  int memory = 10;
  int max_iter = 200;
  double grad_tol = 1e-8;  // infinity norm
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  int max_line_search = 25;
};

struct LbfgsReport {
  int iterations = 0;
  double f = 0.0;
  double grad_norm = 0.0;
  std::string reason;  // "converged" | "max_iter" | "callback" | "line_search_failed"
};

LbfgsReport lbfgs_minimize(const Objective& objective, std::vector<double>& x,
                           const LbfgsOptions& opts,
                           const IterCallback& callback = nullptr);

}  // namespace swq

#endif
