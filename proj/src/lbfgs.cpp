#include "swapqoc/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace swq {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double inf_norm(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

struct Pair {
  std::vector<double> s, y;
  double rho;
};

// Strong Wolfe line search (bracket + zoom with bisection safeguard).
// Returns the accepted step, or 0 on failure. Updates x, f, g in place.
double line_search(const Objective& objective, std::vector<double>& x,
                   double& f, std::vector<double>& g,
                   const std::vector<double>& d, const LbfgsOptions& opts) {
  const double f0 = f;
  const double dg0 = dot(g, d);
  if (dg0 >= 0.0) return 0.0;  // not a descent direction

  const std::vector<double> x0 = x;
  auto eval = [&](double a) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = x0[i] + a * d[i];
    f = objective(x, g);
    return dot(g, d);
  };

  double a_prev = 0.0, f_prev = f0, dg_prev = dg0;
  double a = 1.0;
  double a_lo = 0.0, a_hi = 0.0, f_lo = f0, dg_lo = dg0;
  bool bracketed = false;

  int it = 0;
  for (; it < opts.max_line_search; ++it) {
    const double dg = eval(a);
    if (f > f0 + opts.wolfe_c1 * a * dg0 || (it > 0 && f >= f_prev)) {
      a_lo = a_prev;
      f_lo = f_prev;
      dg_lo = dg_prev;
      a_hi = a;
      bracketed = true;
      break;
    }
    if (std::abs(dg) <= -opts.wolfe_c2 * dg0) return a;  // strong Wolfe holds
    if (dg >= 0.0) {
      a_lo = a;
      f_lo = f;
      dg_lo = dg;
      a_hi = a_prev;
      bracketed = true;
      break;
    }
    a_prev = a;
    f_prev = f;
    dg_prev = dg;
    a *= 2.0;
  }
  if (!bracketed) {
    eval(0.0);
    return 0.0;
  }

  for (; it < opts.max_line_search; ++it) {
    // quadratic interpolation using (a_lo, f_lo, dg_lo) and f at midpoint
    double a_mid = 0.5 * (a_lo + a_hi);
    const double dg = eval(a_mid);
    if (f > f0 + opts.wolfe_c1 * a_mid * dg0 || f >= f_lo) {
      a_hi = a_mid;
    } else {
      if (std::abs(dg) <= -opts.wolfe_c2 * dg0) return a_mid;
      if (dg * (a_hi - a_lo) >= 0.0) a_hi = a_lo;
      a_lo = a_mid;
      f_lo = f;
      dg_lo = dg;
    }
    if (std::abs(a_hi - a_lo) < 1e-14 * std::max(1.0, std::abs(a_lo))) break;
  }
  // Fall back to the best sufficient-decrease point found, if any.
  if (f_lo < f0 && a_lo > 0.0) {
    eval(a_lo);
    return a_lo;
  }
  eval(0.0);
  return 0.0;
}

}  // namespace

LbfgsReport lbfgs_minimize(const Objective& objective, std::vector<double>& x,
                           const LbfgsOptions& opts,
                           const IterCallback& callback) {
  const std::size_t n = x.size();
  std::vector<double> g(n, 0.0);
  double f = objective(x, g);
  std::deque<Pair> history;

  LbfgsReport rep;
  rep.f = f;
  rep.grad_norm = inf_norm(g);
  if (callback && callback(0, x, f, rep.grad_norm)) {
    rep.reason = "callback";
    return rep;
  }
  if (rep.grad_norm <= opts.grad_tol) {
    rep.reason = "converged";
    return rep;
  }

  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    // two-loop recursion
    std::vector<double> d = g;
    std::vector<double> alpha(history.size());
    for (std::size_t i = history.size(); i-- > 0;) {
      alpha[i] = history[i].rho * dot(history[i].s, d);
      for (std::size_t j = 0; j < n; ++j) d[j] -= alpha[i] * history[i].y[j];
    }
    if (!history.empty()) {
      const auto& last = history.back();
      const double scale = dot(last.s, last.y) / dot(last.y, last.y);
      for (auto& v : d) v *= scale;
    }
    for (std::size_t i = 0; i < history.size(); ++i) {
      const double beta = history[i].rho * dot(history[i].y, d);
      for (std::size_t j = 0; j < n; ++j) {
        d[j] += (alpha[i] - beta) * history[i].s[j];
      }
    }
    for (auto& v : d) v = -v;

    const std::vector<double> x_old = x;
    const std::vector<double> g_old = g;
    const double step = line_search(objective, x, f, g, d, opts);
    if (step == 0.0) {
      rep.reason = "line_search_failed";
      rep.iterations = iter - 1;
      rep.f = f;
      rep.grad_norm = inf_norm(g);
      return rep;
    }

    Pair p;
    p.s.resize(n);
    p.y.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      p.s[j] = x[j] - x_old[j];
      p.y[j] = g[j] - g_old[j];
    }
    const double sy = dot(p.s, p.y);
    if (sy > 1e-12) {
      p.rho = 1.0 / sy;
      history.push_back(std::move(p));
      if (static_cast<int>(history.size()) > opts.memory) history.pop_front();
    }

    rep.iterations = iter;
    rep.f = f;
    rep.grad_norm = inf_norm(g);
    if (callback && callback(iter, x, f, rep.grad_norm)) {
      rep.reason = "callback";
      return rep;
    }
    if (rep.grad_norm <= opts.grad_tol) {
      rep.reason = "converged";
      return rep;
    }
  }
  rep.reason = "max_iter";
  return rep;
}

}  // namespace swq
