#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ucgs/core.hpp"
#include "ucgs/problem.hpp"

namespace ucgs {

/// Thrown for malformed or inconsistent configurations; the message carries a
/// line/field diagnostic.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat key=value run configuration. '#' starts a comment, blank lines are
/// ignored, later assignments override earlier ones.
struct RunConfig {
  // instance
  std::string objective = "quadratic";  // quadratic | pnorm
  int dim = 50;
  int rows = 60;
  double p = 1.5;  // pnorm exponent
  std::uint64_t seed = 1;
  std::string set = "simplex";  // simplex | l1ball | box | l2ball
  double radius = 1.0;          // l1ball / l2ball
  double lo = -1.0;             // box, broadcast
  double hi = 1.0;
  double shift = 0.0;   // displaces the zero-residual point off the set (f* unknown when > 0)
  double Anorm = 1.0;   // operator norm ||A||_2 of the generated matrix

  // method
  std::string method = "ucgs";  // cg | gug-sliding | ucgs
  std::int64_t N = 1000;        // budget for cg / gug-sliding
  std::optional<double> nu;     // gug-sliding; empty = analytic value of the objective
  std::optional<double> Mnu;    // gug-sliding; empty = analytic value of the objective
  double epsilon = 1e-3;        // ucgs target accuracy
  double sigma = 0.0;
  std::optional<double> sigma_delta;
  std::optional<double> sigma_cert;
  double L0 = 1.0;

  // harness
  std::string out;
  bool timing = false;
  std::vector<std::string> compare_methods = {"cg", "ucgs"};
  std::vector<double> compare_eps = {1e-1, 1e-2, 1e-3, 1e-4};
  std::int64_t compare_budget = 1000000;
  int jobs = 1;
  double inject_eta_scale = 1.0;
};

namespace detail {

inline std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

inline double parse_double(const std::string& value, const std::string& where) {
  try {
    size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw config_error(where + ": expected a number, got '" + value + "'");
  }
}

inline std::int64_t parse_int(const std::string& value, const std::string& where) {
  try {
    size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw config_error(where + ": expected an integer, got '" + value + "'");
  }
}

inline bool parse_bool(const std::string& value, const std::string& where) {
  if (value == "0" || value == "false") return false;
  if (value == "1" || value == "true") return true;
  throw config_error(where + ": expected 0/1/true/false, got '" + value + "'");
}

/// Applies one key=value pair; `where` names the source for diagnostics.
inline void apply_key(RunConfig& cfg, const std::string& key, const std::string& value,
                      const std::string& where) {
  const std::string at = where + ": field " + key;
  if (key == "objective") {
    if (value != "quadratic" && value != "pnorm")
      throw config_error(at + ": must be quadratic or pnorm");
    cfg.objective = value;
  } else if (key == "dim") {
    cfg.dim = static_cast<int>(parse_int(value, at));
  } else if (key == "rows") {
    cfg.rows = static_cast<int>(parse_int(value, at));
  } else if (key == "p") {
    cfg.p = parse_double(value, at);
  } else if (key == "seed") {
    cfg.seed = static_cast<std::uint64_t>(parse_int(value, at));
  } else if (key == "set") {
    if (value != "simplex" && value != "l1ball" && value != "box" && value != "l2ball")
      throw config_error(at + ": must be simplex, l1ball, box or l2ball");
    cfg.set = value;
  } else if (key == "radius") {
    cfg.radius = parse_double(value, at);
  } else if (key == "lo") {
    cfg.lo = parse_double(value, at);
  } else if (key == "hi") {
    cfg.hi = parse_double(value, at);
  } else if (key == "shift") {
    cfg.shift = parse_double(value, at);
  } else if (key == "Anorm") {
    cfg.Anorm = parse_double(value, at);
  } else if (key == "method") {
    if (value != "cg" && value != "gug-sliding" && value != "ucgs")
      throw config_error(at + ": must be cg, gug-sliding or ucgs");
    cfg.method = value;
  } else if (key == "N") {
    cfg.N = parse_int(value, at);
  } else if (key == "nu") {
    cfg.nu = value == "auto" ? std::optional<double>{} : parse_double(value, at);
  } else if (key == "Mnu") {
    cfg.Mnu = value == "auto" ? std::optional<double>{} : parse_double(value, at);
  } else if (key == "epsilon") {
    cfg.epsilon = parse_double(value, at);
  } else if (key == "sigma") {
    cfg.sigma = parse_double(value, at);
  } else if (key == "sigma_delta") {
    cfg.sigma_delta = value.empty() ? std::optional<double>{} : parse_double(value, at);
  } else if (key == "sigma_cert") {
    cfg.sigma_cert = value.empty() ? std::optional<double>{} : parse_double(value, at);
  } else if (key == "L0") {
    cfg.L0 = parse_double(value, at);
  } else if (key == "out") {
    cfg.out = value;
  } else if (key == "timing") {
    cfg.timing = parse_bool(value, at);
  } else if (key == "compare.methods") {
    cfg.compare_methods = split(value, ',');
    for (const auto& m : cfg.compare_methods)
      if (m != "cg" && m != "gug-sliding" && m != "ucgs")
        throw config_error(at + ": unknown method '" + m + "'");
  } else if (key == "compare.eps") {
    cfg.compare_eps.clear();
    for (const auto& e : split(value, ',')) cfg.compare_eps.push_back(parse_double(e, at));
  } else if (key == "compare.budget") {
    cfg.compare_budget = parse_int(value, at);
  } else if (key == "jobs") {
    cfg.jobs = static_cast<int>(parse_int(value, at));
  } else if (key == "inject.eta_scale") {
    cfg.inject_eta_scale = parse_double(value, at);
  } else {
    throw config_error(where + ": unknown key '" + key + "'");
  }
}

}  // namespace detail

/// Cross-field consistency checks, applied after all assignments.
inline void validate_config(const RunConfig& cfg) {
  auto fail = [](const std::string& field, const std::string& msg) {
    throw config_error("config: field " + field + ": " + msg);
  };
  if (cfg.dim < 1) fail("dim", "must be >= 1");
  if (cfg.rows < 1) fail("rows", "must be >= 1");
  if (cfg.objective == "pnorm" && !(cfg.p > 1.0 && cfg.p < 2.0))
    fail("p", "pnorm exponent must lie in (1,2)");
  if (cfg.set == "box" && !(cfg.lo < cfg.hi)) fail("lo", "box requires lo < hi");
  if ((cfg.set == "l1ball" || cfg.set == "l2ball") && !(cfg.radius > 0.0))
    fail("radius", "must be positive");
  if (cfg.shift < 0.0) fail("shift", "must be nonnegative");
  if (!(cfg.Anorm > 0.0)) fail("Anorm", "must be positive");
  if (cfg.method == "cg" || cfg.method == "gug-sliding") {
    if (cfg.N < 1) fail("N", "must be >= 1");
  }
  if (cfg.method == "gug-sliding") {
    if (cfg.nu && !(*cfg.nu > 0.0 && *cfg.nu < 1.0))
      fail("nu", "sliding regime requires nu in (0,1)");
    if (!cfg.nu && cfg.objective == "quadratic")
      fail("nu", "sliding regime requires nu in (0,1); the quadratic objective has nu = 1");
    if (cfg.Mnu && !(*cfg.Mnu > 0.0)) fail("Mnu", "must be positive");
  }
  if (cfg.method == "ucgs") {
    if (!(cfg.epsilon > 0.0)) fail("epsilon", "must be positive");
    if (cfg.sigma < 0.0) fail("sigma", "must be nonnegative");
    if (cfg.sigma_delta && *cfg.sigma_delta < 0.0) fail("sigma_delta", "must be nonnegative");
    if (cfg.sigma_cert && *cfg.sigma_cert < 0.0) fail("sigma_cert", "must be nonnegative");
    if (!(cfg.L0 > 0.0)) fail("L0", "must be positive");
  }
  if (cfg.compare_eps.size() >= 1)
    for (double e : cfg.compare_eps)
      if (!(e > 0.0)) fail("compare.eps", "entries must be positive");
  if (cfg.compare_budget < 1) fail("compare.budget", "must be >= 1");
  if (cfg.jobs < 1) fail("jobs", "must be >= 1");
  if (!(cfg.inject_eta_scale > 0.0)) fail("inject.eta_scale", "must be positive");
}

/// Parses config text. Diagnostics carry 1-based line numbers.
inline RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw config_error("line " + std::to_string(lineno) + ": empty key");
    detail::apply_key(cfg, key, value, "line " + std::to_string(lineno));
  }
  return cfg;
}

/// Applies a command-line override of the form key=value.
inline void apply_override(RunConfig& cfg, const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    throw config_error("override '" + assignment + "': expected key=value");
  const std::string key = detail::trim(assignment.substr(0, eq));
  const std::string value = detail::trim(assignment.substr(eq + 1));
  detail::apply_key(cfg, key, value, "override");
}

/// Builds the feasible set described by the config.
inline FeasibleSet build_set(const RunConfig& cfg) {
  if (cfg.set == "simplex") return FeasibleSet::simplex(cfg.dim);
  if (cfg.set == "l1ball") return FeasibleSet::l1ball(Vector::Zero(cfg.dim), cfg.radius);
  if (cfg.set == "l2ball") return FeasibleSet::l2ball(Vector::Zero(cfg.dim), cfg.radius);
  return FeasibleSet::box(Vector::Constant(cfg.dim, cfg.lo), Vector::Constant(cfg.dim, cfg.hi));
}

/// Builds the instance described by the config (known optimum when shift = 0).
inline GeneratedInstance build_instance(const RunConfig& cfg) {
  const FeasibleSet set = build_set(cfg);
  if (cfg.objective == "quadratic")
    return make_quadratic_instance(set, cfg.rows, cfg.seed, cfg.shift, cfg.Anorm);
  return make_pnorm_instance(set, cfg.rows, cfg.p, cfg.seed, cfg.shift, cfg.Anorm);
}

}  // namespace ucgs
