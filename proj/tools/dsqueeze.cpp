#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dsqueeze/commands.hpp"
#include "dsqueeze/config.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::string> transition, potential, kind, output, sweep_variable, figure_id, spacing;
  std::optional<int> N, jobs, K_max, count, figure_points, intervals;
  std::optional<double> V0, b_pot, r0, omega_pp, tolerance, start, stop, rho_max, refine, ext_refine,
      extent_a, extent_b;
  std::optional<double> d, x, ratio2d, ratio1d, bho;
  std::vector<double> values;
  bool linear = false;
  bool show_config = false;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config_path, "TOML run configuration; flags override its values");
  app->add_option("-N,--particles", o.N, "particle number (2 or 3)");
  app->add_option("--potential", o.potential, "preset name: harmonic, G-small, G-large, M-small, M-large");
  app->add_option("--kind", o.kind, "custom potential kind: harmonic, gaussian, morse");
  app->add_option("--V0", o.V0, "potential depth");
  app->add_option("--b-pot", o.b_pot, "potential range");
  app->add_option("--r0", o.r0, "Morse minimum position");
  app->add_option("--omega-pp", o.omega_pp, "harmonic pair frequency");
  app->add_option("--K-max", o.K_max, "three-body hypermomentum cutoff (even)");
  app->add_option("--rho-max", o.rho_max, "d-solver box size (0: adaptive)");
  app->add_option("--intervals", o.intervals, "d-solver mesh intervals (0: adaptive)");
  app->add_option("--spacing", o.spacing, "d-solver mesh spacing: graded or uniform");
  app->add_option("--refine", o.refine, "d-solver mesh refinement factor");
  app->add_option("--ext-refine", o.ext_refine, "external solver mesh refinement factor");
  app->add_option("--ext-extent-a", o.extent_a, "external solver free-direction extent (0: adaptive)");
  app->add_option("--ext-extent-b", o.extent_b, "external solver trapped-direction extent (0: adaptive)");
  app->add_option("--tolerance", o.tolerance, "dimension matching tolerance");
  app->add_option("-j,--jobs", o.jobs, "worker threads (default: DSQUEEZE_JOBS or 1)");
  app->add_option("-o,--output", o.output, "output file (default: standard output)");
  app->add_flag("--print-config", o.show_config, "print the effective configuration as TOML and exit");
}

dsq::RunConfig effective_config(const std::string& command, const Overrides& o) {
  dsq::RunConfig c;
  c.jobs = dsq::default_jobs();
  if (!o.config_path.empty()) c = dsq::load_config(o.config_path, c);
  c.command = command;
  if (o.transition) c.transition = dsq::parse_transition(*o.transition);
  if (o.N) c.N = *o.N;
  if (o.potential) c.potential = dsq::preset(*o.potential);
  const bool custom = o.kind || o.V0 || o.b_pot || o.r0 || o.omega_pp;
  if (o.kind) c.potential.kind = dsq::potential_kind_from_string(*o.kind);
  if (o.V0) c.potential.V0 = *o.V0;
  if (o.b_pot) c.potential.b_pot = *o.b_pot;
  if (o.r0) c.potential.r0 = *o.r0;
  if (o.omega_pp) c.potential.omega_pp = *o.omega_pp;
  if (custom) c.potential.name.clear();
  if (o.K_max) c.K_max = *o.K_max;
  if (o.rho_max) c.d_grid.rho_max = *o.rho_max;
  if (o.intervals) c.d_grid.intervals = *o.intervals;
  if (o.spacing) c.d_grid.spacing = dsq::spacing_from_string(*o.spacing);
  if (o.refine) c.d_grid.refine = *o.refine;
  if (o.ext_refine) c.ext_refine = *o.ext_refine;
  if (o.extent_a) c.ext_extent_a = *o.extent_a;
  if (o.extent_b) c.ext_extent_b = *o.extent_b;
  if (o.tolerance) c.match_tolerance = *o.tolerance;
  if (o.jobs) c.jobs = *o.jobs;
  if (o.output) c.output = *o.output;

  const bool point_given = o.d || o.x || o.ratio2d || o.ratio1d || o.bho;
  if (point_given) c.point = {};
  if (o.d) c.point.d = *o.d;
  if (o.x) c.point.x = *o.x;
  if (o.ratio2d) c.point.ratio2d = *o.ratio2d;
  if (o.ratio1d) c.point.ratio1d = *o.ratio1d;
  if (o.bho) c.point.bho = *o.bho;

  if (o.sweep_variable) c.sweep.variable = dsq::sweep_variable_from_string(*o.sweep_variable);
  if (!o.values.empty()) c.sweep.values = o.values;
  if (o.start || o.stop || o.count) c.sweep.values.clear();
  if (o.start) c.sweep.start = *o.start;
  if (o.stop) c.sweep.stop = *o.stop;
  if (o.count) c.sweep.count = *o.count;
  if (o.linear) c.sweep.log = false;

  if (o.figure_id) c.figure = *o.figure_id;
  if (o.figure_points) c.figure_points = *o.figure_points;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dimensional-squeezing translator: continuous-dimension and external-trap few-body solvers"};
  app.set_version_flag("--version", std::string("dsqueeze ") + dsq::kToolVersion);
  app.require_subcommand(1);

  Overrides o;

  auto* translate = app.add_subcommand("translate", "analytic d, x, b_ho/r_2D, b_ho/r_1D and s of a transition");
  add_common(translate, o);
  translate->add_option("transition", o.transition, "3to2, 3to1 or 2to1");
  translate->add_option("--d", o.d, "dimension");
  translate->add_option("--x", o.x, "frequency ratio omega_ho/omega_pp (default 1 when no input is given)");
  translate->add_option("--ratio2d", o.ratio2d, "b_ho/r_2D (harmonic pair)");
  translate->add_option("--ratio1d", o.ratio1d, "b_ho/r_1D (harmonic pair)");

  auto* solve_d = app.add_subcommand("solve-d", "ground state of the hyperradial problem at dimension d");
  add_common(solve_d, o);
  solve_d->add_option("--d", o.d, "dimension (default 3)");

  auto* solve_ext = app.add_subcommand("solve-ext", "two-body ground state in a squeezing trap");
  add_common(solve_ext, o);
  solve_ext->add_option("transition", o.transition, "3to2, 3to1 or 2to1");
  solve_ext->add_option("--bho", o.bho, "trap oscillator length (default 1)");
  solve_ext->add_option("--ratio2d", o.ratio2d, "trap length in units of r_2D");

  auto* curve = app.add_subcommand("curve", "translation curve over a sweep of trap strengths");
  add_common(curve, o);
  curve->add_option("transition", o.transition, "3to2, 3to1 or 2to1");
  curve->add_option("--sweep", o.sweep_variable, "sweep variable: bho, ratio2d or d");
  curve->add_option("--values", o.values, "explicit sweep values")->delimiter(',');
  curve->add_option("--start", o.start, "range start");
  curve->add_option("--stop", o.stop, "range stop");
  curve->add_option("--count", o.count, "number of range points");
  curve->add_flag("--linear", o.linear, "linear instead of logarithmic spacing");

  auto* figure = app.add_subcommand("figure", "figure data CSV and gnuplot script");
  add_common(figure, o);
  figure->add_option("id", o.figure_id, "fig1a..fig1e, fig2a..fig2e, fig3b, fig4a, fig4b, fig5a, fig5b");
  figure->add_option("--points", o.figure_points, "points per series");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dsq::exit_validation;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  dsq::RunConfig c;
  try {
    c = effective_config(command, o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dsq::exit_validation;
  }
  if (o.show_config) {
    std::cout << dsq::to_toml(c);
    return dsq::exit_ok;
  }
  return dsq::run(c, std::cout, std::cerr);
}
