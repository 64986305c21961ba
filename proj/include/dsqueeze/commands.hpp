#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dsqueeze/config.hpp"
#include "dsqueeze/d_solver.hpp"
#include "dsqueeze/equivalence.hpp"
#include "dsqueeze/errors.hpp"
#include "dsqueeze/ext_solver.hpp"
#include "dsqueeze/oscillator.hpp"

namespace dsq {

enum ExitCode : int { exit_ok = 0, exit_validation = 2, exit_numeric = 3 };

inline const std::vector<std::string>& curve_columns() {
  static const std::vector<std::string> cols{"b_ho",       "b_ho/r_2D", "b_ho/r_1D", "d_matched",
                                             "d_analytic", "s_fit",     "s_analytic", "E_ext",
                                             "E_d",        "overlap",   "status"};
  return cols;
}

namespace detail {

inline std::string cell(const std::optional<double>& v) {
  if (!v) return "";
  if (std::isinf(*v)) return *v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", *v);
  return buf;
}

inline std::string join(const std::vector<std::string>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + xs[i];
  return s;
}

inline std::string potential_label(const PairPotential& p) {
  if (!p.name.empty()) return p.name;
  std::ostringstream os;
  os.precision(10);
  os << to_string(p.kind) << "(V0=" << p.V0 << " b_pot=" << p.b_pot << " r0=" << p.r0
     << " omega_pp=" << p.omega_pp << ")";
  return os.str();
}

}  // namespace detail

/// '#'-prefixed metadata lines: tool version, config hash, units, run description.
inline void write_csv_header(std::ostream& os, const RunConfig& c, const std::string& run = "") {
  os << "# dsqueeze " << kToolVersion << "\n";
  os << "# config_hash " << config_hash(c) << "\n";
  os << "# units: hbar = m = 1; lengths in b_pot; energies in hbar^2/(m b_pot^2)\n";
  if (!run.empty()) {
    os << "# command " << run << "\n";
  } else {
    os << "# command " << c.command << " transition " << c.transition.label() << " N " << c.N
       << " potential " << detail::potential_label(c.potential) << "\n";
  }
}

inline void write_curve_csv(std::ostream& os, const RunConfig& c, const TranslationCurve& curve) {
  write_csv_header(os, c);
  os << "# r_2D " << detail::cell(curve.r_2d) << " r_1D " << detail::cell(curve.r_1d) << "\n";
  os << detail::join(curve_columns()) << "\n";
  for (const auto& p : curve.points) {
    std::vector<std::string> row{detail::cell(p.b_ho),     detail::cell(p.over_r2d),
                                 detail::cell(p.over_r1d), detail::cell(p.d),
                                 detail::cell(p.d_analytic), detail::cell(p.s),
                                 detail::cell(p.s_analytic), detail::cell(p.E_ext),
                                 detail::cell(p.E_d),      detail::cell(p.overlap),
                                 p.status};
    os << detail::join(row) << "\n";
  }
}

inline bool point_failed(const TranslationPoint& p) {
  return p.status.rfind("bracket-error", 0) == 0 || p.status.rfind("numeric-error", 0) == 0 ||
         p.status.rfind("accuracy-error", 0) == 0;
}

// ---------------------------------------------------------------------------------------

/// Mutually consistent analytic quantities of a transition from d, x, b_ho/r_2D or b_ho/r_1D.
inline int cmd_translate(const RunConfig& c, std::ostream& out) {
  const Transition t = c.transition;
  t.validate();
  std::vector<std::pair<std::string, double>> cand;
  const auto& p = c.point;
  if (p.d) cand.emplace_back("d", *p.d);
  if (p.x) {
    if (!(*p.x >= 0.0)) throw DomainError("translate: x must be >= 0");
    cand.emplace_back("x", symmetric_dimension(t, *p.x));
  }
  if (p.ratio2d) cand.emplace_back("b_ho/r_2D", symmetric_dimension(t, frequency_ratio_from_bho(c.N, *p.ratio2d, RmsUnit::r2d)));
  if (p.ratio1d) cand.emplace_back("b_ho/r_1D", symmetric_dimension(t, frequency_ratio_from_bho(c.N, *p.ratio1d, RmsUnit::r1d)));
  if (cand.empty()) cand.emplace_back("x", symmetric_dimension(t, 1.0));  // default: omega_ho = omega_pp
  const double d = cand.front().second;
  for (const auto& [name, v] : cand)
    if (std::abs(v - d) > 1e-9 * std::max(1.0, std::abs(d))) {
      std::ostringstream os;
      os.precision(12);
      os << "translate: inconsistent inputs: " << cand.front().first << " gives d = " << d << " but " << name
         << " gives d = " << v;
      throw DomainError(os.str());
    }
  if (!(d > t.d_fin && d < t.d_ini)) {
    std::ostringstream os;
    os << "translate: d = " << d << " outside the open interval (" << t.d_fin << ", " << t.d_ini
       << "); the endpoints are excluded";
    throw BracketError(os.str(), t.d_fin, t.d_ini);
  }
  const double x = frequency_ratio_from_dimension(t, d);
  std::optional<double> r2, r1;
  try {
    const auto r = bho_over_rms(t, d, c.N);
    r2 = r.over_r2d;
    r1 = r.over_r1d;
  } catch (const UnsupportedError&) {
  }
  out << "transition,N,d,x,b_ho/r_2D,b_ho/r_1D,s\n";
  out << t.label() << "," << c.N << "," << detail::cell(d) << "," << detail::cell(x) << ","
      << detail::cell(r2) << "," << detail::cell(r1) << "," << detail::cell(scale_from_ratio(x)) << "\n";
  return exit_ok;
}

inline int cmd_solve_d(const RunConfig& c, std::ostream& out, std::ostream& err) {
  auto pb = d_problem(c.N, c.point.d.value_or(3.0), c.potential, c.match_options());
  pb.check_channel_convergence = c.N == 3;
  const auto sol = solve_ground(pb);
  for (const auto& w : sol.warnings) err << "warning: " << w << "\n";
  const auto rms = rms_observables(sol);
  write_csv_header(out, c);
  out << "quantity,value\n";
  out << "d," << detail::cell(pb.d) << "\n";
  out << "l," << detail::cell(pb.l()) << "\n";
  out << "E_d," << detail::cell(sol.energy) << "\n";
  out << "status," << (sol.bound ? "bound" : "unbound") << "\n";
  out << "n_r," << sol.n_r << "\n";
  out << "rho_rms," << detail::cell(rms.rho_rms) << "\n";
  out << "radius," << detail::cell(rms.radius) << "\n";
  out << "rho_max," << detail::cell(sol.rho_max) << "\n";
  for (std::size_t k = 0; k < sol.K_list.size(); ++k)
    out << "weight_K" << sol.K_list[k] << "," << detail::cell(sol.channel_weights[k]) << "\n";
  return exit_ok;
}

inline int cmd_solve_ext(const RunConfig& c, std::ostream& out) {
  if (c.N != 2) throw UnsupportedError("solve-ext: the external-field solver handles N = 2 only");
  double b_ho;
  if (c.point.bho) {
    b_ho = *c.point.bho;
  } else if (c.point.ratio2d) {
    b_ho = *c.point.ratio2d * potential_rms_radii(2, c.potential, c.match_options()).first;
  } else {
    b_ho = 1.0;
  }
  const auto trap = TrapConfig::from_bho(c.transition, b_ho);
  ExtGridSpec g;
  g.refine = c.ext_refine;
  g.extent_a = c.ext_extent_a;
  g.extent_b = c.ext_extent_b;
  const auto sol = solve_relative_ground(c.potential, trap, g);
  write_csv_header(out, c);
  out << "quantity,value\n";
  out << "b_ho," << detail::cell(b_ho) << "\n";
  out << "omega_ho," << detail::cell(trap.omega_ho()) << "\n";
  out << "E_rel," << detail::cell(sol.E_rel) << "\n";
  out << "E_0," << detail::cell(sol.E_0) << "\n";
  out << "E_ext," << detail::cell(sol.E_ext) << "\n";
  out << "norm," << detail::cell(sol.norm()) << "\n";
  out << "boundary_ratio," << detail::cell(sol.boundary_ratio) << "\n";
  return exit_ok;
}

inline int cmd_curve(const RunConfig& c, std::ostream& out) {
  const auto curve = build_translation_curve(c.transition, c.N, c.potential, c.sweep.points(),
                                             c.sweep.variable, c.curve_options());
  write_curve_csv(out, c, curve);
  std::size_t failed = 0;
  for (const auto& p : curve.points) failed += point_failed(p);
  return !curve.points.empty() && failed == curve.points.size() ? exit_numeric : exit_ok;
}

// ---------------------------------------------------------------------------------------
// figures

inline const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"fig1a", "fig1b", "fig1c", "fig1d", "fig1e", "fig2a",
                                            "fig2b", "fig2c", "fig2d", "fig2e", "fig3b", "fig4a",
                                            "fig4b", "fig5a", "fig5b"};
  return ids;
}

struct FigureRow {
  std::string series;
  std::string kind;  // numeric | analytic | analytic-external | endpoint
  double x, y;
};

struct FigureData {
  std::string id, xlabel, ylabel;
  std::string transition;  // empty for fig3b
  int N = 2;
  std::vector<FigureRow> rows;
};

namespace detail {

struct FigureSpec {
  Transition t;
  int N;
  bool s_axis;   // y = s instead of d
  RmsUnit unit;  // abscissa b_ho / r_unit
};

inline FigureSpec figure_spec(const std::string& id) {
  if (id == "fig3a")
    throw UnsupportedError("figure fig3a needs three-body external-field solves, which are out of scope");
  const bool known = std::find(figure_ids().begin(), figure_ids().end(), id) != figure_ids().end();
  if (!known) throw DomainError("unknown figure id '" + id + "'");
  const char panel = id.back();
  const std::string family = id.substr(0, 4);
  if (family == "fig1" || family == "fig2") {
    static const Transition ts[] = {{3, 2}, {3, 1}, {2, 1}, {3, 1}, {2, 1}};
    const int i = panel - 'a';
    return {ts[i], 2, family == "fig2", i < 3 ? RmsUnit::r2d : RmsUnit::r1d};
  }
  if (family == "fig4" || family == "fig5")
    return {{3, 1}, 3, family == "fig5", panel == 'a' ? RmsUnit::r1d : RmsUnit::r2d};
  return {{3, 1}, 3, false, RmsUnit::r2d};  // fig3b
}

}  // namespace detail

/// Data series of a figure: per shipped short-range preset plus the closed-form companion.
inline FigureData build_figure(const RunConfig& c, const std::string& id) {
  const auto spec = detail::figure_spec(id);
  FigureData fig;
  fig.id = id;
  fig.N = spec.N;
  if (id != "fig3b") fig.transition = spec.t.label();
  const int n = c.figure_points;
  const auto opts = c.curve_options();

  if (id == "fig3b") {
    fig.xlabel = "(d-1)/(3-d)";
    fig.ylabel = "E_d";
    std::vector<double> us(n);
    for (int i = 0; i < n; ++i) us[i] = std::exp(std::log(0.05) + (std::log(20.0) - std::log(0.05)) * i / (n - 1));
    for (const auto& name : short_range_preset_names()) {
      const auto p = preset(name);
      const auto E = parallel_map(us.size() + 1, c.jobs, [&](std::size_t i) {
        const double d = i < us.size() ? (1.0 + 3.0 * us[i]) / (1.0 + us[i]) : 1.0;
        return d_energy(3, d, p, opts.match);
      });
      for (std::size_t i = 0; i < us.size(); ++i) fig.rows.push_back({name, "numeric", us[i], E[i]});
      fig.rows.push_back({name, "endpoint", 0.0, E.back()});
    }
    return fig;
  }

  const std::string rname = spec.unit == RmsUnit::r2d ? "r_2D" : "r_1D";
  fig.xlabel = "b_ho/" + rname;
  fig.ylabel = spec.s_axis ? "s" : "d";
  std::vector<double> ratios(n);
  for (int i = 0; i < n; ++i) ratios[i] = std::exp(std::log(0.3) + (std::log(3.0) - std::log(0.3)) * i / (n - 1));
  for (const auto& name : short_range_preset_names()) {
    const auto p = preset(name);
    const double r2 = potential_rms_radii(spec.N, p, opts.match).first;
    const double r1 = potential_rms_radii(spec.N, p, opts.match).second;
    // abscissae requested on the figure axis, converted to b_ho/r_2D for the curve builder
    std::vector<double> xs;
    for (double r : ratios) xs.push_back(spec.unit == RmsUnit::r2d ? r : r * r1 / r2);
    const auto curve = build_translation_curve(spec.t, spec.N, p, xs, SweepVariable::ratio2d, opts);
    for (const auto& pt : curve.points) {
      const double x = spec.unit == RmsUnit::r2d ? pt.over_r2d : pt.over_r1d.value_or(pt.b_ho / r1);
      const std::optional<double> y = spec.s_axis ? (spec.N == 2 ? pt.s : pt.s_analytic) : pt.d;
      if (!y) continue;
      fig.rows.push_back({name, spec.N == 2 ? "numeric" : "analytic-external", x, *y});
    }
  }
  const int dense = 100;
  for (int i = 0; i < dense; ++i) {
    const double r = std::exp(std::log(0.3) + (std::log(3.0) - std::log(0.3)) * i / (dense - 1));
    const double x = frequency_ratio_from_bho(spec.N, r, spec.unit);
    const double y = spec.s_axis ? scale_from_bho(spec.t, spec.N, r, spec.unit) : symmetric_dimension(spec.t, x);
    fig.rows.push_back({"analytic", "analytic", r, y});
  }
  return fig;
}

inline void write_figure_csv(std::ostream& os, const RunConfig& c, const FigureData& f) {
  std::string run = "figure " + f.id + " N " + std::to_string(f.N);
  if (!f.transition.empty()) run += " transition " + f.transition;
  run += " potentials";
  for (const auto& n : short_range_preset_names()) run += " " + n;
  write_csv_header(os, c, run);
  os << "# figure " << f.id << " x = " << f.xlabel << " y = " << f.ylabel << "\n";
  os << "series,kind,x,y\n";
  for (const auto& r : f.rows)
    os << r.series << "," << r.kind << "," << detail::cell(r.x) << "," << detail::cell(r.y) << "\n";
}

/// gnuplot script that reads only `csv_name`.
inline std::string figure_script(const FigureData& f, const std::string& csv_name) {
  std::vector<std::string> series;
  for (const auto& r : f.rows)
    if (std::find(series.begin(), series.end(), r.series) == series.end()) series.push_back(r.series);
  std::ostringstream os;
  os << "set datafile separator ','\n";
  os << "set key autotitle columnhead\n";
  os << "set xlabel '" << f.xlabel << "'\n";
  os << "set ylabel '" << f.ylabel << "'\n";
  if (f.id != "fig3b") os << "set logscale x\n";
  os << "plot \\\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const bool analytic = series[i] == "analytic";
    os << "  '" << csv_name << "' using 3:(strcol(1) eq '" << series[i] << "' ? $4 : 1/0) with "
       << (analytic ? "lines dt 2" : "linespoints") << " title '" << series[i] << "'"
       << (i + 1 < series.size() ? ", \\\n" : "\n");
  }
  return os.str();
}

inline int cmd_figure(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto fig = build_figure(c, c.figure);
  const std::string csv = c.output.empty() ? c.figure + ".csv" : c.output;
  std::string stem = csv;
  if (stem.size() > 4 && stem.substr(stem.size() - 4) == ".csv") stem = stem.substr(0, stem.size() - 4);
  const std::string gp = stem + ".gp";
  {
    std::ofstream f(csv);
    if (!f) throw ConfigurationError("cannot write '" + csv + "'");
    write_figure_csv(f, c, fig);
  }
  {
    std::ofstream f(gp);
    if (!f) throw ConfigurationError("cannot write '" + gp + "'");
    const auto slash = csv.find_last_of('/');
    f << figure_script(fig, slash == std::string::npos ? csv : csv.substr(slash + 1));
  }
  out << csv << "\n" << gp << "\n";
  (void)err;
  return exit_ok;
}

/// Runs the configured command; maps error categories to exit codes.
inline int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    c.validate();
    std::ofstream file;
    const bool to_file = !c.output.empty() && c.command != "figure";
    if (to_file) {
      file.open(c.output);
      if (!file) throw ConfigurationError("cannot write '" + c.output + "'");
    }
    std::ostream& o = to_file ? static_cast<std::ostream&>(file) : out;
    if (c.command == "translate") return cmd_translate(c, o);
    if (c.command == "solve-d") return cmd_solve_d(c, o, err);
    if (c.command == "solve-ext") return cmd_solve_ext(c, o);
    if (c.command == "curve") return cmd_curve(c, o);
    return cmd_figure(c, o, err);
  } catch (const BracketError& e) {
    err << "error: " << e.what() << "\n";
    return exit_validation;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return exit_numeric;
  } catch (const AccuracyError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return exit_numeric;
  } catch (const std::invalid_argument& e) {  // DomainError, UnsupportedError
    err << "error: " << e.what() << "\n";
    return exit_validation;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return exit_validation;
  } catch (const std::runtime_error& e) {  // ConfigurationError and the rest
    err << "error: " << e.what() << "\n";
    return exit_validation;
  }
}

}  // namespace dsq
