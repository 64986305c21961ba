#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dsqueeze/bspline.hpp"
#include "dsqueeze/d_solver.hpp"
#include "dsqueeze/equivalence.hpp"
#include "dsqueeze/errors.hpp"
#include "dsqueeze/oscillator.hpp"
#include "dsqueeze/potentials.hpp"
#include "dsqueeze/toml.hpp"

namespace dsq {

inline constexpr const char* kToolVersion = "1.0.0";

/// Sweep abscissae: explicit `values`, or `count` points from `start` to `stop`.
struct SweepSpec {
  SweepVariable variable = SweepVariable::ratio2d;
  std::vector<double> values;
  double start = 0.3;
  double stop = 3.0;
  int count = 10;
  bool log = true;

  std::vector<double> points() const {
    if (!values.empty()) return values;
    if (count < 1) throw DomainError("sweep: count must be >= 1");
    if (count == 1) return {start};
    if (log && !(start > 0.0 && stop > 0.0)) throw DomainError("sweep: log range needs positive ends");
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) {
      const double f = static_cast<double>(i) / (count - 1);
      out[i] = log ? std::exp(std::log(start) + f * (std::log(stop) - std::log(start)))
                   : start + f * (stop - start);
    }
    return out;
  }

  bool operator==(const SweepSpec& o) const {
    return variable == o.variable && values == o.values && start == o.start && stop == o.stop &&
           count == o.count && log == o.log;
  }
};

/// Single-point inputs of translate, solve-d and solve-ext.
struct PointSpec {
  std::optional<double> d, x, ratio2d, ratio1d, bho;
  bool operator==(const PointSpec& o) const = default;
};

struct RunConfig {
  std::string command = "curve";
  Transition transition{3, 2};
  int N = 2;
  PairPotential potential = preset("harmonic");
  SweepSpec sweep;
  PointSpec point;
  GridSpec d_grid;
  int K_max = 12;
  double ext_refine = 1.0;
  double ext_extent_a = 0.0;
  double ext_extent_b = 0.0;
  double match_tolerance = 1e-7;
  std::string figure = "fig1a";
  int figure_points = 10;
  std::string output;  // empty: standard output
  int jobs = 1;

  void validate() const {
    static const std::vector<std::string> commands{"translate", "solve-d", "solve-ext", "curve", "figure"};
    if (std::find(commands.begin(), commands.end(), command) == commands.end())
      throw DomainError("unknown command '" + command + "'");
    transition.validate();
    if (N != 2 && N != 3) throw UnsupportedError("N must be 2 or 3");
    potential.validate();
    if (K_max < 0 || K_max % 2 != 0) throw DomainError("K_max must be even and >= 0");
    if (!(match_tolerance > 0.0)) throw DomainError("match tolerance must be positive");
    if (!(ext_refine > 0.0) || !(d_grid.refine > 0.0)) throw DomainError("refine factors must be positive");
    if (jobs < 1) throw DomainError("jobs must be >= 1");
    if (figure_points < 2) throw DomainError("figure points must be >= 2");
  }

  MatchOptions match_options() const {
    MatchOptions m;
    m.tolerance = match_tolerance;
    m.K_max = K_max;
    m.grid = d_grid;
    return m;
  }

  CurveOptions curve_options() const {
    CurveOptions c;
    c.match = match_options();
    c.ext_grid.refine = ext_refine;
    c.ext_grid.extent_a = ext_extent_a;
    c.ext_grid.extent_b = ext_extent_b;
    c.jobs = jobs;
    return c;
  }

  bool operator==(const RunConfig& o) const {
    return command == o.command && transition == o.transition && N == o.N && potential == o.potential &&
           potential.name == o.potential.name && sweep == o.sweep && point == o.point &&
           d_grid == o.d_grid && K_max == o.K_max && ext_refine == o.ext_refine &&
           ext_extent_a == o.ext_extent_a && ext_extent_b == o.ext_extent_b &&
           match_tolerance == o.match_tolerance && figure == o.figure &&
           figure_points == o.figure_points && output == o.output && jobs == o.jobs;
  }
};

/// Default parallelism: DSQUEEZE_JOBS if set to a positive integer, else 1.
inline int default_jobs() {
  const char* env = std::getenv("DSQUEEZE_JOBS");
  if (!env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1) return 1;
  return static_cast<int>(v);
}

namespace detail {

inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

inline std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

inline double get_number(const toml::Value& v, const std::string& key) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  throw ConfigurationError("config key '" + key + "' must be a number");
}
inline int get_int(const toml::Value& v, const std::string& key) {
  const double d = get_number(v, key);
  if (d != std::floor(d) || std::abs(d) > 1e9) throw ConfigurationError("config key '" + key + "' must be an integer");
  return static_cast<int>(d);
}
inline std::string get_string(const toml::Value& v, const std::string& key) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  throw ConfigurationError("config key '" + key + "' must be a string");
}
inline bool get_bool(const toml::Value& v, const std::string& key) {
  if (const auto* b = std::get_if<bool>(&v)) return *b;
  throw ConfigurationError("config key '" + key + "' must be true or false");
}
inline std::vector<double> get_numbers(const toml::Value& v, const std::string& key) {
  const auto* a = std::get_if<toml::Array>(&v);
  if (!a) throw ConfigurationError("config key '" + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : *a) {
    const auto* d = std::get_if<double>(&e);
    if (!d) throw ConfigurationError("config key '" + key + "' must be an array of numbers");
    out.push_back(*d);
  }
  return out;
}

}  // namespace detail

/// Canonical TOML text of a config; parse_config(to_toml(c)) == c.
inline std::string to_toml(const RunConfig& c) {
  using detail::format_double;
  using detail::quote;
  std::ostringstream os;
  os << "command = " << quote(c.command) << "\n";
  os << "transition = " << quote(c.transition.label()) << "\n";
  os << "N = " << c.N << "\n";
  os << "output = " << quote(c.output) << "\n";
  os << "jobs = " << c.jobs << "\n";
  os << "\n[potential]\n";
  if (!c.potential.name.empty()) os << "preset = " << quote(c.potential.name) << "\n";
  os << "kind = " << quote(to_string(c.potential.kind)) << "\n";
  os << "V0 = " << format_double(c.potential.V0) << "\n";
  os << "b_pot = " << format_double(c.potential.b_pot) << "\n";
  os << "r0 = " << format_double(c.potential.r0) << "\n";
  os << "omega_pp = " << format_double(c.potential.omega_pp) << "\n";
  os << "\n[sweep]\n";
  os << "variable = " << quote(to_string(c.sweep.variable)) << "\n";
  os << "values = [";
  for (std::size_t i = 0; i < c.sweep.values.size(); ++i)
    os << (i ? ", " : "") << format_double(c.sweep.values[i]);
  os << "]\n";
  os << "start = " << format_double(c.sweep.start) << "\n";
  os << "stop = " << format_double(c.sweep.stop) << "\n";
  os << "count = " << c.sweep.count << "\n";
  os << "log = " << (c.sweep.log ? "true" : "false") << "\n";
  os << "\n[point]\n";
  auto opt = [&](const char* k, const std::optional<double>& v) {
    if (v) os << k << " = " << format_double(*v) << "\n";
  };
  opt("d", c.point.d);
  opt("x", c.point.x);
  opt("ratio2d", c.point.ratio2d);
  opt("ratio1d", c.point.ratio1d);
  opt("bho", c.point.bho);
  os << "\n[grid]\n";
  os << "rho_max = " << format_double(c.d_grid.rho_max) << "\n";
  os << "intervals = " << c.d_grid.intervals << "\n";
  os << "spacing = " << quote(to_string(c.d_grid.spacing)) << "\n";
  os << "refine = " << format_double(c.d_grid.refine) << "\n";
  os << "K_max = " << c.K_max << "\n";
  os << "ext_refine = " << format_double(c.ext_refine) << "\n";
  os << "ext_extent_a = " << format_double(c.ext_extent_a) << "\n";
  os << "ext_extent_b = " << format_double(c.ext_extent_b) << "\n";
  os << "\n[tolerance]\n";
  os << "match = " << format_double(c.match_tolerance) << "\n";
  os << "\n[figure]\n";
  os << "id = " << quote(c.figure) << "\n";
  os << "points = " << c.figure_points << "\n";
  return os.str();
}

/// Applies TOML text on top of `base` (defaults when omitted). Unknown keys are rejected.
inline RunConfig parse_config(const std::string& text, RunConfig base = {}) {
  using namespace detail;
  const auto t = toml::parse(text);
  RunConfig c = std::move(base);
  // the preset is applied first so that explicit parameters refine it
  if (auto it = t.find("potential.preset"); it != t.end()) c.potential = preset(get_string(it->second, it->first));
  const bool has_preset = t.count("potential.preset") > 0;
  bool custom = false, has_params = false;
  for (const auto& [key, v] : t) {
    if (key == "potential.preset") continue;
    if (key == "command") c.command = get_string(v, key);
    else if (key == "transition") c.transition = parse_transition(get_string(v, key));
    else if (key == "N") c.N = get_int(v, key);
    else if (key == "output") c.output = get_string(v, key);
    else if (key == "jobs") c.jobs = get_int(v, key);
    else if (key == "potential.kind") {
      const auto k = potential_kind_from_string(get_string(v, key));
      has_params = true;
      custom |= k != c.potential.kind;
      c.potential.kind = k;
    } else if (key == "potential.V0" || key == "potential.b_pot" || key == "potential.r0" ||
               key == "potential.omega_pp") {
      const double x = get_number(v, key);
      has_params = true;
      double& field = key == "potential.V0" ? c.potential.V0
                      : key == "potential.b_pot" ? c.potential.b_pot
                      : key == "potential.r0" ? c.potential.r0
                                              : c.potential.omega_pp;
      custom |= field != x;
      field = x;
    } else if (key == "sweep.variable") c.sweep.variable = sweep_variable_from_string(get_string(v, key));
    else if (key == "sweep.values") c.sweep.values = get_numbers(v, key);
    else if (key == "sweep.start") c.sweep.start = get_number(v, key);
    else if (key == "sweep.stop") c.sweep.stop = get_number(v, key);
    else if (key == "sweep.count") c.sweep.count = get_int(v, key);
    else if (key == "sweep.log") c.sweep.log = get_bool(v, key);
    else if (key == "point.d") c.point.d = get_number(v, key);
    else if (key == "point.x") c.point.x = get_number(v, key);
    else if (key == "point.ratio2d") c.point.ratio2d = get_number(v, key);
    else if (key == "point.ratio1d") c.point.ratio1d = get_number(v, key);
    else if (key == "point.bho") c.point.bho = get_number(v, key);
    else if (key == "grid.rho_max") c.d_grid.rho_max = get_number(v, key);
    else if (key == "grid.intervals") c.d_grid.intervals = get_int(v, key);
    else if (key == "grid.spacing") c.d_grid.spacing = spacing_from_string(get_string(v, key));
    else if (key == "grid.refine") c.d_grid.refine = get_number(v, key);
    else if (key == "grid.K_max") c.K_max = get_int(v, key);
    else if (key == "grid.ext_refine") c.ext_refine = get_number(v, key);
    else if (key == "grid.ext_extent_a") c.ext_extent_a = get_number(v, key);
    else if (key == "grid.ext_extent_b") c.ext_extent_b = get_number(v, key);
    else if (key == "tolerance.match") c.match_tolerance = get_number(v, key);
    else if (key == "figure.id") c.figure = get_string(v, key);
    else if (key == "figure.points") c.figure_points = get_int(v, key);
    else throw ConfigurationError("unknown config key '" + key + "'");
  }
  if (custom || (has_params && !has_preset)) c.potential.name.clear();
  return c;
}

inline RunConfig load_config(const std::string& path, RunConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

/// FNV-1a (64 bit) of the canonical config with output path and parallelism removed, so the
/// hash identifies the computation rather than how it was run.
inline std::string config_hash(const RunConfig& c) {
  RunConfig k = c;
  k.output.clear();
  k.jobs = 1;
  const std::string text = to_toml(k);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace dsq
