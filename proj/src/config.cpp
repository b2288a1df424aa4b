#include "swapqoc/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

extern char** environ;

namespace swq {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void fail(const std::string& origin, int line,
                       const std::string& msg) {
  std::ostringstream os;
  os << origin;
  if (line > 0) os << ":" << line;
  os << ": " << msg;
  throw std::runtime_error(os.str());
}

double parse_double(const std::string& key, const std::string& value,
                    const std::string& origin, int line) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0' || errno == ERANGE) {
    fail(origin, line, "malformed number for key '" + key + "': " + value);
  }
  return v;
}

long long parse_int(const std::string& key, const std::string& value,
                    const std::string& origin, int line) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0' || errno == ERANGE) {
    fail(origin, line, "malformed integer for key '" + key + "': " + value);
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& value,
                const std::string& origin, int line) {
  if (value == "1" || value == "true" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "no") return false;
  fail(origin, line, "malformed boolean for key '" + key + "': " + value);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string item;
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  return out;
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& value,
                                      const std::string& origin, int line) {
  std::vector<double> out;
  for (const auto& item : split(value, ',')) {
    if (item.empty()) continue;
    out.push_back(parse_double(key, item, origin, line));
  }
  if (out.empty()) fail(origin, line, "empty list for key '" + key + "'");
  return out;
}

// "n:dt[:eval][:max_iter]" entries, comma separated.
std::vector<GridStage> parse_cascade(const std::string& key,
                                     const std::string& value,
                                     const std::string& origin, int line) {
  std::vector<GridStage> out;
  for (const auto& entry : split(value, ',')) {
    if (entry.empty()) continue;
    const auto parts = split(entry, ':');
    if (parts.size() < 2) {
      fail(origin, line, "cascade entry needs n:dt, got: " + entry);
    }
    GridStage stage;
    stage.n = static_cast<int>(parse_int(key, parts[0], origin, line));
    stage.dt = parse_double(key, parts[1], origin, line);
    for (std::size_t i = 2; i < parts.size(); ++i) {
      if (parts[i] == "eval") {
        stage.evaluate_only = true;
      } else {
        stage.max_iter = static_cast<int>(parse_int(key, parts[i], origin, line));
      }
    }
    out.push_back(stage);
  }
  if (out.empty()) fail(origin, line, "empty cascade for key '" + key + "'");
  return out;
}

void apply_key(RunConfig& c, const std::string& key, const std::string& value,
               const std::string& origin, int line) {
  auto d = [&] { return parse_double(key, value, origin, line); };
  auto i = [&] { return parse_int(key, value, origin, line); };
  auto b = [&] { return parse_bool(key, value, origin, line); };

  if (key == "problem") {
    if (value != "merge" && value != "full_gate") {
      fail(origin, line, "problem must be merge or full_gate, got: " + value);
    }
    c.problem = value;
  } else if (key == "durations") {
    c.durations = parse_double_list(key, value, origin, line);
  } else if (key == "cascade") {
    c.cascade = parse_cascade(key, value, origin, line);
  } else if (key == "seeds") {
    c.seeds = static_cast<int>(i());
  } else if (key == "rng") {
    c.rng = static_cast<std::uint64_t>(i());
  } else if (key == "alpha_target") {
    c.alpha_target = d();
  } else if (key == "seed_amplitude") {
    c.seed_amplitude = d();
  } else if (key == "m_min") {
    c.m_min = static_cast<int>(i());
  } else if (key == "m_max") {
    c.m_max = static_cast<int>(i());
  } else if (key == "out") {
    c.out_dir = value;
  } else if (key == "dt") {
    c.dt = d();
  } else if (key == "grid_n") {
    c.grid_n = static_cast<int>(i());
  } else if (key == "lattice.site_a") {
    c.lattice.site_a = d();
  } else if (key == "lattice.v_z_khz") {
    c.lattice.v_z_khz = d();
  } else if (key == "lattice.a_s") {
    c.lattice.a_s = d();
  } else if (key == "lattice.mass_amu") {
    c.lattice.mass_amu = d();
  } else if (key == "scaling.beta") {
    c.scaling.beta_scale = d();
  } else if (key == "scaling.theta") {
    c.scaling.theta_scale = d();
  } else if (key == "scaling.v0_khz") {
    c.scaling.v0_scale_khz = d();
  } else if (key == "weights.gamma") {
    c.weights.gamma = d();
  } else if (key == "weights.sigma") {
    c.weights.sigma = d();
  } else if (key == "weights.beta_lo") {
    c.weights.beta.lo = d();
  } else if (key == "weights.beta_hi") {
    c.weights.beta.hi = d();
  } else if (key == "weights.theta_lo") {
    c.weights.theta.lo = d();
  } else if (key == "weights.theta_hi") {
    c.weights.theta.hi = d();
  } else if (key == "weights.v0_lo") {
    c.weights.v0.lo = d();
  } else if (key == "weights.v0_hi") {
    c.weights.v0.hi = d();
  } else if (key == "stopping.threshold") {
    c.stopping.fidelity_threshold = d();
  } else if (key == "stopping.grad_tol") {
    c.stopping.grad_tol = d();
  } else if (key == "stopping.max_iter") {
    c.stopping.max_iter = static_cast<int>(i());
  } else if (key == "stopping.wall_time_s") {
    c.stopping.wall_time_s = d();
  } else if (key == "absorber.enabled") {
    c.absorber.enabled = b();
  } else if (key == "absorber.strength_khz") {
    c.absorber.strength_khz = d();
  } else if (key == "absorber.width_frac") {
    c.absorber.width_frac = d();
  } else {
    fail(origin, line, "unknown key '" + key + "'");
  }
}

}  // namespace

ProblemKind RunConfig::kind() const {
  return problem == "merge" ? ProblemKind::merge : ProblemKind::full_gate;
}

OptimizationProblem RunConfig::problem_for(double duration) const {
  OptimizationProblem p;
  p.kind = kind();
  p.duration = duration;
  p.alpha_target = alpha_target;
  p.weights = weights;
  p.cascade = cascade;
  p.stopping = stopping;
  p.lattice = lattice;
  p.scaling = scaling;
  p.absorber = absorber;
  return p;
}

void apply_config_value(RunConfig& config, const std::string& key,
                        const std::string& value) {
  apply_key(config, key, value, "<set>", 0);
}

RunConfig parse_config_text(const std::string& text,
                            const std::string& origin) {
  RunConfig config;
  std::istringstream is(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(origin, lineno, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(origin, lineno, "expected key = value, got: " + line);
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(origin, lineno, "empty key");
    if (!section.empty()) key = section + "." + key;
    apply_key(config, key, value, origin, lineno);
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return parse_config_text(os.str(), path);
}

void apply_env_overrides(RunConfig& config) {
  const std::string prefix = "SWAPQOC_";
  for (char** e = environ; e && *e; ++e) {
    const std::string entry = *e;
    if (entry.rfind(prefix, 0) != 0) continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos) continue;
    std::string key = entry.substr(prefix.size(), eq - prefix.size());
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char ch) { return std::tolower(ch); });
    // double underscore separates the section
    const auto sep = key.find("__");
    if (sep != std::string::npos) key = key.substr(0, sep) + "." + key.substr(sep + 2);
    apply_key(config, key, entry.substr(eq + 1), "environment " + entry.substr(0, eq), 0);
  }
}

std::string resolved_config(const RunConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "# resolved swapqoc configuration\n";
  os << "problem = " << c.problem << "\n";
  os << "durations = ";
  for (std::size_t i = 0; i < c.durations.size(); ++i) {
    os << (i ? "," : "") << c.durations[i];
  }
  os << "\n";
  const auto cascade =
      c.cascade.empty() ? default_cascade(c.kind()) : c.cascade;
  os << "cascade = ";
  for (std::size_t i = 0; i < cascade.size(); ++i) {
    os << (i ? "," : "") << cascade[i].n << ":" << cascade[i].dt;
    if (cascade[i].evaluate_only) os << ":eval";
    if (cascade[i].max_iter > 0) os << ":" << cascade[i].max_iter;
  }
  os << "\n";
  os << "seeds = " << c.seeds << "\n";
  os << "rng = " << c.rng << "\n";
  os << "alpha_target = " << c.alpha_target << "\n";
  os << "seed_amplitude = " << c.seed_amplitude << "\n";
  os << "m_min = " << c.m_min << "\n";
  os << "m_max = " << c.m_max << "\n";
  os << "out = " << c.out_dir << "\n";
  os << "dt = " << c.dt << "\n";
  os << "grid_n = " << c.grid_n << "\n";
  os << "\n[lattice]\n";
  os << "site_a = " << c.lattice.site_a << "\n";
  os << "v_z_khz = " << c.lattice.v_z_khz << "\n";
  os << "a_s = " << c.lattice.a_s << "\n";
  os << "mass_amu = " << c.lattice.mass_amu << "\n";
  os << "\n[scaling]\n";
  os << "beta = " << c.scaling.beta_scale << "\n";
  os << "theta = " << c.scaling.theta_scale << "\n";
  os << "v0_khz = " << c.scaling.v0_scale_khz << "\n";
  os << "\n[weights]\n";
  os << "gamma = " << c.weights.gamma << "\n";
  os << "sigma = " << c.weights.sigma << "\n";
  os << "beta_lo = " << c.weights.beta.lo << "\n";
  os << "beta_hi = " << c.weights.beta.hi << "\n";
  os << "theta_lo = " << c.weights.theta.lo << "\n";
  os << "theta_hi = " << c.weights.theta.hi << "\n";
  os << "v0_lo = " << c.weights.v0.lo << "\n";
  os << "v0_hi = " << c.weights.v0.hi << "\n";
  os << "\n[stopping]\n";
  os << "threshold = " << c.stopping.fidelity_threshold << "\n";
  os << "grad_tol = " << c.stopping.grad_tol << "\n";
  os << "max_iter = " << c.stopping.max_iter << "\n";
  os << "wall_time_s = " << c.stopping.wall_time_s << "\n";
  os << "\n[absorber]\n";
  os << "enabled = " << (c.absorber.enabled ? 1 : 0) << "\n";
  os << "strength_khz = " << c.absorber.strength_khz << "\n";
  os << "width_frac = " << c.absorber.width_frac << "\n";
  return os.str();
}

}  // namespace swq
