#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "dsqueeze/commands.hpp"
#include "dsqueeze/config.hpp"

#ifndef DSQUEEZE_CLI_PATH
#define DSQUEEZE_CLI_PATH "./dsqueeze"
#endif

using namespace dsq;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" DSQUEEZE_CLI_PATH "' " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// data rows of a CSV with '#' metadata lines and one header row
std::vector<std::vector<std::string>> rows(const std::string& csv) {
  std::vector<std::vector<std::string>> out;
  bool header = false;
  for (const auto& l : lines(csv)) {
    if (l.empty() || l[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    out.push_back(split(l));
  }
  return out;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("dsqueeze_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

// ---------------------------------------------------------------------------------------
// configuration

TEST(Config, ParsesTablesAndValues) {
  const auto c = parse_config(R"(
command = "curve"   # trailing comment
transition = "3to1"
N = 2
jobs = 3

[potential]
preset = "G-large"

[sweep]
variable = "bho"
values = [0.5, 1.0, 2e0]

[tolerance]
match = 1e-8
)");
  EXPECT_EQ(c.command, "curve");
  EXPECT_EQ(c.transition, (Transition{3, 1}));
  EXPECT_EQ(c.jobs, 3);
  EXPECT_EQ(c.potential.name, "G-large");
  EXPECT_EQ(c.sweep.variable, SweepVariable::bho);
  EXPECT_EQ(c.sweep.values, (std::vector<double>{0.5, 1.0, 2.0}));
  EXPECT_EQ(c.match_tolerance, 1e-8);
}

TEST(Config, PresetRefinedByParametersBecomesCustom) {
  const auto c = parse_config("[potential]\npreset = \"G-large\"\nV0 = -4.0\n");
  EXPECT_EQ(c.potential.kind, PotentialKind::gaussian);
  EXPECT_EQ(c.potential.V0, -4.0);
  EXPECT_TRUE(c.potential.name.empty());
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(parse_config("unknown_key = 1\n"), ConfigurationError);
  EXPECT_THROW(parse_config("[grid]\nbogus = 2\n"), ConfigurationError);
  EXPECT_THROW(parse_config("N = \n"), ConfigurationError);
  EXPECT_THROW(parse_config("[potential\n"), ConfigurationError);
  EXPECT_THROW(parse_config("just words\n"), ConfigurationError);
  EXPECT_THROW(parse_config("command = \"open\n"), ConfigurationError);
  EXPECT_THROW(parse_config("N = \"two\"\n"), ConfigurationError);
  EXPECT_THROW(load_config("/nonexistent/config.toml"), ConfigurationError);
}

TEST(Config, RoundTripIsLossless) {
  RunConfig c;
  c.command = "figure";
  c.transition = {2, 1};
  c.N = 3;
  c.potential = preset("M-large");
  c.sweep.values = {0.3, 0.7, 1.0 / 3.0};
  c.sweep.variable = SweepVariable::d;
  c.sweep.log = false;
  c.point.d = 2.2;
  c.point.bho = 0.1;
  c.d_grid.refine = 1.5;
  c.d_grid.spacing = Spacing::uniform;
  c.K_max = 8;
  c.ext_extent_a = 12.5;
  c.match_tolerance = 3e-9;
  c.figure = "fig4b";
  c.figure_points = 7;
  c.output = "out dir/x.csv";
  c.jobs = 4;
  EXPECT_EQ(parse_config(to_toml(c)), c);
  RunConfig custom;
  custom.potential.kind = PotentialKind::morse;
  custom.potential.V0 = 1.25;
  custom.potential.r0 = 0.75;
  custom.potential.name.clear();
  EXPECT_EQ(parse_config(to_toml(custom)), custom);
  EXPECT_EQ(parse_config(to_toml(RunConfig{})), RunConfig{});
}

TEST(Config, HashIgnoresParallelismAndOutput) {
  RunConfig a;
  RunConfig b = a;
  b.jobs = 8;
  b.output = "elsewhere.csv";
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.K_max = 10;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(Config, ValidationCatchesBadValues) {
  RunConfig c;
  c.N = 4;
  EXPECT_THROW(c.validate(), UnsupportedError);
  c = {};
  c.K_max = 3;
  EXPECT_THROW(c.validate(), DomainError);
  c = {};
  c.jobs = 0;
  EXPECT_THROW(c.validate(), DomainError);
  c = {};
  c.command = "plot";
  EXPECT_THROW(c.validate(), DomainError);
}

TEST(Config, JobsFromEnvironment) {
  ::setenv("DSQUEEZE_JOBS", "6", 1);
  EXPECT_EQ(default_jobs(), 6);
  ::setenv("DSQUEEZE_JOBS", "zero", 1);
  EXPECT_EQ(default_jobs(), 1);
  ::unsetenv("DSQUEEZE_JOBS");
  EXPECT_EQ(default_jobs(), 1);
}

// ---------------------------------------------------------------------------------------
// CSV schema

TEST(CurveCsv, GoldenHeader) {
  RunConfig c;
  c.sweep.values = {1.0};
  std::ostringstream os;
  ASSERT_EQ(cmd_curve(c, os), exit_ok);
  const auto ls = lines(os.str());
  ASSERT_GE(ls.size(), 7u);
  EXPECT_EQ(ls[0], "# dsqueeze 1.0.0");
  EXPECT_EQ(ls[1], "# config_hash " + config_hash(c));
  EXPECT_EQ(ls[2], "# units: hbar = m = 1; lengths in b_pot; energies in hbar^2/(m b_pot^2)");
  EXPECT_EQ(ls[3], "# command curve transition 3to2 N 2 potential harmonic");
  EXPECT_EQ(ls[4], "# r_2D 1 r_1D ");
  EXPECT_EQ(ls[5], "b_ho,b_ho/r_2D,b_ho/r_1D,d_matched,d_analytic,s_fit,s_analytic,E_ext,E_d,overlap,status");
  const auto cells = split(ls[6]);
  ASSERT_EQ(cells.size(), 11u);
  EXPECT_EQ(cells[2], "");  // 3to2 has no r_1D column value
  EXPECT_EQ(cells[10], "ok");
}

TEST(CurveCsv, MissingValuesAreEmpty) {
  EXPECT_EQ(detail::cell(std::nullopt), "");
  EXPECT_EQ(detail::cell(kInfinity), "inf");
  EXPECT_EQ(detail::cell(0.1), "0.1");
}

TEST(CurveCsv, HarmonicColumnsAgree) {
  RunConfig c;
  c.transition = {3, 1};
  c.sweep.start = 0.4;
  c.sweep.stop = 4.0;
  c.sweep.count = 5;
  std::ostringstream os;
  ASSERT_EQ(cmd_curve(c, os), exit_ok);
  const auto rs = rows(os.str());
  ASSERT_EQ(rs.size(), 5u);
  for (const auto& r : rs) {
    EXPECT_NEAR(std::stod(r[3]), std::stod(r[4]), 1e-4);
    EXPECT_NEAR(std::stod(r[5]), std::stod(r[6]), 1e-4);
    EXPECT_FALSE(r[2].empty());
  }
}

// ---------------------------------------------------------------------------------------
// commands through the library

TEST(Translate, ThreeToOneAtDimensionTwo) {
  RunConfig c;
  c.transition = {3, 1};
  c.point.d = 2.0;
  std::ostringstream os;
  ASSERT_EQ(cmd_translate(c, os), exit_ok);
  const auto ls = lines(os.str());
  ASSERT_EQ(ls.size(), 2u);
  EXPECT_EQ(ls[0], "transition,N,d,x,b_ho/r_2D,b_ho/r_1D,s");
  const auto r = split(ls[1]);
  EXPECT_EQ(r[0], "3to1");
  EXPECT_NEAR(std::stod(r[3]), 0.75, 1e-12);
  EXPECT_NEAR(std::stod(r[5]), 1.632993, 1e-6);
  EXPECT_NEAR(std::stod(r[6]), std::pow(1.0 + 0.75 * 0.75, -0.25), 1e-9);
}

TEST(Translate, InputsMustAgree) {
  RunConfig c;
  c.command = "translate";
  c.point.x = 1.0;
  c.point.d = 2.5;
  std::ostringstream out, err;
  EXPECT_EQ(run(c, out, err), exit_validation);
  EXPECT_NE(err.str().find("inconsistent"), std::string::npos);
  c.point.d = 1.0 + std::sqrt(2.0);
  EXPECT_EQ(run(c, out, err), exit_ok);
}

TEST(Run, UnsupportedCombinationsAreValidationErrors) {
  RunConfig c;
  c.command = "solve-ext";
  c.N = 3;
  std::ostringstream out, err;
  EXPECT_EQ(run(c, out, err), exit_validation);
  c = {};
  c.command = "figure";
  c.figure = "fig3a";
  err.str("");
  EXPECT_EQ(run(c, out, err), exit_validation);
  EXPECT_NE(err.str().find("out of scope"), std::string::npos);
}

TEST(Run, AllPointsFailingIsNumericError) {
  RunConfig c;
  c.command = "curve";
  c.potential = preset("G-small");
  c.sweep.values = {1.0, 2.0};
  c.ext_extent_a = 1.0;
  c.ext_extent_b = 1.0;
  std::ostringstream out, err;
  EXPECT_EQ(run(c, out, err), exit_numeric);
  for (const auto& r : rows(out.str())) EXPECT_EQ(r.back().rfind("accuracy-error", 0), 0u);
}

// ---------------------------------------------------------------------------------------
// figures

TEST(Figure, ScriptReferencesOnlyTheCsv) {
  FigureData f;
  f.id = "fig1a";
  f.xlabel = "b_ho/r_2D";
  f.ylabel = "d";
  f.rows = {{"G-small", "numeric", 0.5, 2.2}, {"G-small", "numeric", 1.0, 2.4}, {"analytic", "analytic", 1.0, 2.41}};
  const auto gp = figure_script(f, "fig1a.csv");
  EXPECT_NE(gp.find("'fig1a.csv'"), std::string::npos);
  EXPECT_NE(gp.find("G-small"), std::string::npos);
  EXPECT_NE(gp.find("title 'analytic'"), std::string::npos);
  std::size_t quotes = 0;
  for (std::size_t p = gp.find(".csv"); p != std::string::npos; p = gp.find(".csv", p + 1)) ++quotes;
  EXPECT_EQ(quotes, 2u);
  EXPECT_EQ(gp.find("system"), std::string::npos);
}

TEST(Figure, ThreeBodyEnergiesWithEndpointMarkers) {
  RunConfig c;
  c.figure_points = 2;
  const auto f = build_figure(c, "fig3b");
  EXPECT_EQ(f.N, 3);
  std::map<std::string, int> numeric, endpoint;
  for (const auto& r : f.rows) (r.kind == "endpoint" ? endpoint : numeric)[r.series]++;
  for (const auto& name : short_range_preset_names()) {
    EXPECT_EQ(numeric[name], 2) << name;
    EXPECT_EQ(endpoint[name], 1) << name;
  }
  EXPECT_THROW(build_figure(c, "fig9z"), DomainError);
}

TEST(Figure, ScalePanelCarriesAnalyticCompanion) {
  RunConfig c;
  c.figure_points = 2;
  const auto f = build_figure(c, "fig5b");
  EXPECT_EQ(f.ylabel, "s");
  EXPECT_EQ(f.xlabel, "b_ho/r_2D");
  int analytic = 0;
  for (const auto& r : f.rows) {
    if (r.kind == "analytic") ++analytic;
    else EXPECT_EQ(r.kind, "analytic-external");
    EXPECT_GT(r.y, 0.0);
    EXPECT_LE(r.y, 1.0);
  }
  EXPECT_EQ(analytic, 100);
}

// ---------------------------------------------------------------------------------------
// the executable

TEST(Executable, Version) {
  const auto r = run_cli("--version");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("dsqueeze 1.0.0"), std::string::npos);
}

TEST(Executable, TranslateExamples) {
  auto r = run_cli("translate 3to2 --x 1");
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(std::stod(rows(r.out).at(0).at(2)), 2.414214, 1e-6);
  r = run_cli("translate 3to1 --d 2");
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(std::stod(rows(r.out).at(0).at(5)), 1.632993, 1e-6);
  EXPECT_EQ(run_cli("translate 3to1 --d 1").code, 2);
  EXPECT_EQ(run_cli("translate 3to2 --d 2.5 --x 1").code, 2);
  EXPECT_EQ(run_cli("translate").code, 0);
}

TEST(Executable, ParseErrorsAreValidationErrors) {
  EXPECT_EQ(run_cli("").code, 2);
  EXPECT_EQ(run_cli("translate --d notanumber").code, 2);
  EXPECT_EQ(run_cli("frobnicate").code, 2);
  EXPECT_EQ(run_cli("solve-d --potential nope").code, 2);
}

TEST(Executable, DefaultCurveRuns) {
  const auto r = run_cli("curve --potential harmonic");
  ASSERT_EQ(r.code, 0);
  const auto rs = rows(r.out);
  ASSERT_EQ(rs.size(), 10u);
  for (const auto& row : rs) EXPECT_NEAR(std::stod(row[3]), std::stod(row[4]), 1e-4);
}

TEST(Executable, ConfigFileWithFlagOverride) {
  const auto path = scratch("run.toml");
  std::ofstream(path) << "transition = \"2to1\"\n[point]\nd = 1.5\n";
  const auto r = run_cli("translate --config '" + path.string() + "'");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(rows(r.out).at(0).at(0), "2to1");
  EXPECT_NEAR(std::stod(rows(r.out).at(0).at(2)), 1.5, 1e-12);
  const auto r2 = run_cli("translate --config '" + path.string() + "' --d 1.25");
  EXPECT_NEAR(std::stod(rows(r2.out).at(0).at(2)), 1.25, 1e-12);
  std::ofstream(path) << "bogus = 1\n";
  EXPECT_EQ(run_cli("translate --config '" + path.string() + "'").code, 2);
}

TEST(Executable, PrintConfigRoundTrips) {
  const auto r = run_cli("curve 3to1 --potential G-large --K-max 8 --print-config");
  ASSERT_EQ(r.code, 0);
  const auto c = parse_config(r.out);
  EXPECT_EQ(c.transition, (Transition{3, 1}));
  EXPECT_EQ(c.potential.name, "G-large");
  EXPECT_EQ(c.K_max, 8);
}

TEST(Executable, SolveCommands) {
  auto r = run_cli("solve-d --potential harmonic --d 2.5");
  ASSERT_EQ(r.code, 0);
  bool found = false;
  for (const auto& row : rows(r.out))
    if (row[0] == "E_d") {
      EXPECT_NEAR(std::stod(row[1]), 1.25, 1e-6);
      found = true;
    }
  EXPECT_TRUE(found);
  r = run_cli("solve-ext 3to2 --potential harmonic --bho 1");
  ASSERT_EQ(r.code, 0);
  for (const auto& row : rows(r.out))
    if (row[0] == "E_ext") EXPECT_NEAR(std::stod(row[1]), 0.5 + 0.5 * std::sqrt(2.0), 1e-6);
  EXPECT_EQ(run_cli("solve-ext 3to2 -N 3").code, 2);
}

TEST(Executable, CurveIsIdenticalAcrossJobCounts) {
  const std::string args = "curve 3to2 --potential G-small --count 4 --start 0.5 --stop 3";
  const auto one = run_cli(args + " -j 1");
  ASSERT_EQ(one.code, 0);
  for (int j : {4, 8}) EXPECT_EQ(run_cli(args + " -j " + std::to_string(j)).out, one.out) << j;
  EXPECT_EQ(run_cli(args, "DSQUEEZE_JOBS=3").out, one.out);
}

TEST(Executable, FigureWritesCsvAndScript) {
  const auto csv = scratch("f3b.csv");
  const auto r = run_cli("figure fig3b --points 2 -o '" + csv.string() + "'");
  ASSERT_EQ(r.code, 0);
  ASSERT_TRUE(fs::exists(csv));
  const auto gp = csv.parent_path() / "f3b.gp";
  ASSERT_TRUE(fs::exists(gp));
  std::ifstream in(gp);
  const std::string script((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_NE(script.find("'f3b.csv'"), std::string::npos);
  EXPECT_EQ(run_cli("figure fig3a").code, 2);
  fs::remove_all(csv.parent_path());
}
