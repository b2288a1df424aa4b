#include "swapqoc/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace swq {

double lattice_potential(double x, double beta, double theta, double v0,
                         const LatticeParams& p) {
  const double k = p.k();
  const double c2 = std::cos(beta / 2.0) * std::cos(beta / 2.0);
  const double s2 = std::sin(beta / 2.0) * std::sin(beta / 2.0);
  const double cx = std::cos(k * x - kPi / 2.0);
  const double chi = 1.0 + std::cos(k * x - theta - kPi / 2.0);
  return -v0 * (c2 * (1.0 + cx * cx) + s2 * chi * chi);
}

PotentialGradients lattice_potential_gradients(double x, double beta,
                                               double theta, double v0,
                                               const LatticeParams& p) {
  const double k = p.k();
  const double sb = std::sin(beta);
  const double s2 = std::sin(beta / 2.0) * std::sin(beta / 2.0);
  const double cx = std::cos(k * x - kPi / 2.0);
  const double arg = k * x - theta - kPi / 2.0;
  const double chi = 1.0 + std::cos(arg);

  PotentialGradients g;
  // d/dbeta cos^2(b/2) = -sin(b)/2, d/dbeta sin^2(b/2) = +sin(b)/2
  g.d_beta = -v0 * 0.5 * sb * (chi * chi - (1.0 + cx * cx));
  // d/dtheta cos(arg) = +sin(arg)
  g.d_theta = -v0 * s2 * 2.0 * chi * std::sin(arg);
  g.d_v0 = lattice_potential(x, beta, theta, 1.0, p);
  return g;
}

double omega_z(const LatticeParams& p) {
  return std::sqrt(2.0 * p.v_z() * p.k() * p.k() * p.hbar_over_m());
}

double omega_y(double x, double beta, double theta, double v0,
               const LatticeParams& p) {
  const double k = p.k();
  const double c2 = std::cos(beta / 2.0) * std::cos(beta / 2.0);
  const double s2 = std::sin(beta / 2.0) * std::sin(beta / 2.0);
  const double chi = 1.0 + std::cos(k * x - theta - kPi / 2.0);
  const double radicand = 2.0 * v0 * k * k * p.hbar_over_m() * (c2 + s2 * chi);
  if (radicand < 0.0) {
    throw std::domain_error("omega_y: negative curvature, x is not a transverse minimum");
  }
  return std::sqrt(radicand);
}

double coupling_g1d(double x, double beta, double theta, double v0,
                    const LatticeParams& p) {
  return 2.0 * p.a_s * std::sqrt(omega_y(x, beta, theta, v0, p) * omega_z(p));
}

CouplingGradients coupling_g1d_gradients(double x, double beta, double theta,
                                         double v0, const LatticeParams& p) {
  const double k = p.k();
  const double sb = std::sin(beta);
  const double s2 = std::sin(beta / 2.0) * std::sin(beta / 2.0);
  const double arg = k * x - theta - kPi / 2.0;
  const double chi = 1.0 + std::cos(arg);
  const double wy = omega_y(x, beta, theta, v0, p);
  const double wz = omega_z(p);
  // g = 2 a_s sqrt(wy wz); dg/du = a_s sqrt(wz/wy) dwy/du
  // wy^2 = 2 v0 k^2 (hbar/m) W, W = c2 + s2*chi
  const double pref = 2.0 * v0 * k * k * p.hbar_over_m();
  const double dW_dbeta = 0.5 * sb * chi - 0.5 * sb;  // = sb/2 * (chi - 1)
  const double dW_dtheta = s2 * std::sin(arg);
  CouplingGradients g;
  const double common = p.a_s * std::sqrt(wz / wy) / (2.0 * wy) * pref;
  g.d_beta = common * dW_dbeta;
  g.d_theta = common * dW_dtheta;
  // wy ~ sqrt(v0): dwy/dv0 = wy/(2 v0)
  g.d_v0 = p.a_s * std::sqrt(wz / wy) * wy / (2.0 * v0);
  return g;
}

ControlSet ControlSet::resampled(double new_dt) const {
  const double T = duration();
  const auto new_steps = static_cast<std::size_t>(std::llround(T / new_dt));
  ControlSet out;
  out.dt = new_dt;
  out.scaling = scaling;
  out.beta.resize(new_steps + 1);
  out.theta.resize(new_steps + 1);
  out.v0.resize(new_steps + 1);
  for (std::size_t j = 0; j <= new_steps; ++j) {
    const double t = std::min(static_cast<double>(j) * new_dt, T);
    const double pos = t / dt;
    auto lo = static_cast<std::size_t>(pos);
    if (lo >= steps()) lo = steps() - 1;
    const double w = pos - static_cast<double>(lo);
    out.beta[j] = beta[lo] + w * (beta[lo + 1] - beta[lo]);
    out.theta[j] = theta[lo] + w * (theta[lo + 1] - theta[lo]);
    out.v0[j] = v0[lo] + w * (v0[lo + 1] - v0[lo]);
  }
  // interpolation nodes shared with the old grid stay exact
  return out;
}

ControlSet ControlSet::time_reversed() const {
  ControlSet out = *this;
  std::reverse(out.beta.begin(), out.beta.end());
  std::reverse(out.theta.begin(), out.theta.end());
  std::reverse(out.v0.begin(), out.v0.end());
  return out;
}

void ControlSet::save_csv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << "t,beta,theta,v0\n";
  char buf[160];
  for (std::size_t j = 0; j < samples(); ++j) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n",
                  static_cast<double>(j) * dt, beta[j], theta[j], v0[j]);
    f << buf;
  }
}

ControlSet ControlSet::load_csv(const std::string& path,
                                const ControlScaling& scaling) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open control file " + path);
  std::string line;
  if (!std::getline(f, line) || line.rfind("t,beta,theta,v0", 0) != 0) {
    throw std::runtime_error(path + ": expected header t,beta,theta,v0");
  }
  ControlSet c;
  c.scaling = scaling;
  std::vector<double> times;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    double t, b, th, v;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &t, &b, &th, &v) != 4) {
      throw std::runtime_error(path + ": malformed row: " + line);
    }
    times.push_back(t);
    c.beta.push_back(b);
    c.theta.push_back(th);
    c.v0.push_back(v);
  }
  if (times.size() < 2) throw std::runtime_error(path + ": need at least two samples");
  c.dt = times[1] - times[0];
  for (std::size_t j = 1; j < times.size(); ++j) {
    if (std::abs(times[j] - times[j - 1] - c.dt) > 1e-9 * c.dt + 1e-15) {
      throw std::runtime_error(path + ": time samples are not uniform");
    }
  }
  return c;
}

ControlSet constant_control(double T, double dt, double beta, double theta,
                            double v0, const ControlScaling& scaling) {
  const auto steps = static_cast<std::size_t>(std::llround(T / dt));
  if (steps == 0) throw std::invalid_argument("control duration shorter than dt");
  ControlSet c;
  c.dt = dt;
  c.scaling = scaling;
  c.beta.assign(steps + 1, beta);
  c.theta.assign(steps + 1, theta);
  c.v0.assign(steps + 1, v0);
  return c;
}

ControlSet linear_merge_control(double T, double dt,
                                const ControlScaling& scaling) {
  ControlSet c = constant_control(T, dt, 0.0, 1.0, 1.0, scaling);
  const auto n = c.steps();
  for (std::size_t j = 0; j <= n; ++j) {
    c.beta[j] = static_cast<double>(j) / static_cast<double>(n);
  }
  return c;
}

ControlSet concat_hold_reverse(const ControlSet& merge,
                               std::size_t hold_steps) {
  const ControlSet rev = merge.time_reversed();
  ControlSet out;
  out.dt = merge.dt;
  out.scaling = merge.scaling;
  auto append = [&](const std::vector<double>& src, std::vector<double>& dst,
                    std::size_t from) {
    dst.insert(dst.end(), src.begin() + static_cast<std::ptrdiff_t>(from),
               src.end());
  };
  out.beta = merge.beta;
  out.theta = merge.theta;
  out.v0 = merge.v0;
  const std::size_t last = merge.samples() - 1;
  for (std::size_t j = 0; j < hold_steps; ++j) {
    out.beta.push_back(merge.beta[last]);
    out.theta.push_back(merge.theta[last]);
    out.v0.push_back(merge.v0[last]);
  }
  append(rev.beta, out.beta, 1);
  append(rev.theta, out.theta, 1);
  append(rev.v0, out.v0, 1);
  return out;
}

std::vector<double> clamped_potential(const std::vector<double>& x, double beta,
                                      double theta, double v0,
                                      const LatticeParams& p) {
  const double a = p.cell_half_width();
  double v_cst = -1e300;
  for (double xi : x) {
    if (std::abs(xi) <= a) {
      v_cst = std::max(v_cst, lattice_potential(xi, beta, theta, v0, p));
    }
  }
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    v[i] = std::abs(x[i]) <= a ? lattice_potential(x[i], beta, theta, v0, p)
                               : v_cst;
  }
  return v;
}

}  // namespace swq
