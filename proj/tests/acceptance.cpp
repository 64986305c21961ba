// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dsqueeze/dsqueeze.hpp"

using namespace dsq;

namespace {

int failures = 0;

void report(int id, const std::string& title, bool ok, const std::string& detail, double seconds) {
  std::printf("[%s] %2d %s: %s (%.1f s)\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++failures;
}

void info(const std::string& line) {
  std::printf("       %s\n", line.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

template <class Fn>
void criterion(int id, const std::string& title, Fn&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = false;
  std::string detail;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    ok = false;
    detail = std::string("exception: ") + e.what();
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(id, title, ok, detail, s);
}

PairPotential harmonic_pair(double w = 1.0) {
  auto p = preset("harmonic");
  p.omega_pp = w;
  return p;
}

std::vector<double> log_range(double a, double b, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = std::exp(std::log(a) + (std::log(b) - std::log(a)) * i / (n - 1));
  return out;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// independent oracle: node counting of the zero-angular-momentum radial equation with Numerov
int numerov_nodes(const PairPotential& p, double E, double R, double h) {
  const int n = static_cast<int>(std::ceil(R / h));
  h = R / n;
  const double c = h * h / 12.0;
  auto k = [&](double r) { return E - evaluate(p, r); };
  double u0 = 0.0, u1 = h;
  double f0 = 1.0 + c * k(0.0), f1 = 1.0 + c * k(h);
  int nodes = 0;
  for (int i = 1; i < n; ++i) {
    const double f2 = 1.0 + c * k((i + 1) * h);
    const double u2 = ((12.0 - 10.0 * f1) * u1 - f0 * u0) / f2;
    if (u2 * u1 < 0.0) ++nodes;
    u0 = u1;
    u1 = u2;
    f0 = f1;
    f1 = f2;
    if (std::abs(u1) > 1e150) {
      u0 *= 1e-150;
      u1 *= 1e-150;
    }
  }
  return nodes;
}

double shooting_ground_energy(const PairPotential& p) {
  double lo = p.minimum(), hi = 0.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double kappa = std::sqrt(-mid);
    (numerov_nodes(p, mid, 8.0 + 40.0 / kappa, 2e-3) == 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

int main() {
  const std::vector<Transition> two_body{{3, 2}, {3, 1}, {2, 1}};

  criterion(1, "HO translation identities", [&](std::string& detail) {
    double worst = 0.0;
    bool exact_ends = true;
    for (Transition t : all_transitions())
      for (double x : {0.0, 0.1, 0.5, 1.0, 2.0, 10.0, kInfinity}) {
        const double d = symmetric_dimension(t, x);
        const double back = frequency_ratio_from_dimension(t, d);
        if (x == 0.0 || std::isinf(x)) {
          exact_ends &= back == x;
          continue;
        }
        worst = std::max(worst, rel(back, x));
      }
    const double d32 = symmetric_dimension({3, 2}, 1.0);
    detail = fmt("max round-trip rel err %.2e", worst) + fmt(", d(x=1, 3to2) = %.9f", d32);
    return worst <= 1e-12 && exact_ends && std::abs(d32 - 2.414214) <= 1e-6;
  });

  criterion(2, "energy-matching identity", [&](std::string& detail) {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> w(0.0, 6.0), wpp(0.2, 3.0);
    double worst = 0.0;
    for (int N : {2, 3})
      for (int i = 0; i < 50; ++i) {
        const Frequencies om{w(rng), w(rng), w(rng)};
        const double pp = wpp(rng);
        const double ext = pp * energy_ext_ho(om, pp, OccupationSet::ground(), N);
        const double dd = energy_d_ho(N, dimension_from_frequencies(om, pp), 0, pp);
        worst = std::max(worst, rel(ext, dd));
      }
    detail = fmt("max rel err %.2e over 100 triples", worst);
    return worst <= 1e-12;
  });

  criterion(3, "d-solver HO exactness", [&](std::string& detail) {
    double worst = 0.0, min_k0 = 1.0;
    for (int N : {2, 3})
      for (int i = 0; i <= 7; ++i) {
        const double d = std::min(3.0, 1.0 + 0.3 * i);
        HyperradialProblem pb;
        pb.N = N;
        pb.d = d;
        pb.potential = harmonic_pair();
        pb.K_max = N == 3 ? 8 : 0;
        const auto sol = solve_ground(pb);
        worst = std::max(worst, rel(sol.energy, 0.5 * (N - 1) * d));
        if (N == 3) min_k0 = std::min(min_k0, sol.channel_weights[0]);
      }
    detail = fmt("max rel err %.2e", worst) + fmt(", min K=0 weight 1 - %.1e", 1.0 - min_k0);
    return worst <= 1e-6 && min_k0 >= 1.0 - 1e-8;
  });

  criterion(4, "three-body sum rule", [&](std::string& detail) {
    const double w = 1.3;
    double worst_diag = 0.0, worst_off = 0.0;
    for (double d : {1.5, 2.0, 3.0}) {
      const auto basis = build_channel_basis(3, d, 8);
      for (double rho : log_range(0.05, 20.0, 20)) {
        const auto W = potential_coupling_matrix(basis, harmonic_pair(w), rho);
        const double diag = 0.5 * w * w * rho * rho;
        for (int i = 0; i < W.rows(); ++i)
          for (int j = 0; j < W.cols(); ++j) {
            if (i == j) worst_diag = std::max(worst_diag, rel(W(i, i), diag));
            else worst_off = std::max(worst_off, std::abs(W(i, j)) / diag);
          }
      }
    }
    detail = fmt("max off/diag %.2e", worst_off) + fmt(", diag rel err %.2e", worst_diag);
    return worst_off < 1e-10 && worst_diag < 1e-10;
  });

  criterion(5, "external-solver HO exactness", [&](std::string& detail) {
    double e_err = 0.0, s_err = 0.0, min_ov = 1.0;
    for (Transition t : two_body)
      for (double x : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        const auto trap = TrapConfig::symmetric(t, x);
        const auto ext = solve_relative_ground(harmonic_pair(), trap);
        const double closed = energy_ext_ho(trap.scenario.omega, 1.0, OccupationSet::ground(), 2);
        e_err = std::max(e_err, rel(ext.E_ext, closed));
        const auto m = match_dimension(ext.E_ext, 2, harmonic_pair(), t.d_fin, t.d_ini);
        HyperradialProblem pb;
        pb.N = 2;
        pb.d = m.d;
        pb.potential = harmonic_pair();
        const auto fit = fit_scale(ext, solve_ground(pb));
        s_err = std::max(s_err, std::abs(fit.s - scale_from_ratio(x)));
        min_ov = std::min(min_ov, fit.overlap);
      }
    detail = fmt("E_ext rel err %.2e", e_err) + fmt(", s err %.2e", s_err) + fmt(", min overlap 1 - %.1e", 1.0 - min_ov);
    return e_err <= 1e-5 && s_err <= 1e-4 && min_ov >= 1.0 - 1e-6;
  });

  // shared by 6 and 7
  std::vector<TranslationCurve> large;
  const auto ratios = log_range(0.3, 3.0, 10);

  criterion(6, "large-a Gaussian follows the analytic d(b_ho/r_2D)", [&](std::string& detail) {
    bool ok = true;
    std::ostringstream os;
    for (Transition t : two_body) {
      large.push_back(build_translation_curve(t, 2, preset("G-large"), ratios, SweepVariable::ratio2d));
      double dev = 0.0, dev1 = 0.0;
      int missing = 0;
      for (const auto& pt : large.back().points) {
        if (!pt.d) {
          ++missing;
          continue;
        }
        dev = std::max(dev, std::abs(*pt.d - *pt.d_analytic));
        if (pt.over_r1d) {
          const double x = frequency_ratio_from_bho(2, *pt.over_r1d, RmsUnit::r1d);
          dev1 = std::max(dev1, std::abs(*pt.d - symmetric_dimension(t, x)));
        }
      }
      ok &= dev <= 0.15 && missing == 0;
      os << t.label() << fmt(" %.3f", dev) << (missing ? " (" + std::to_string(missing) + " failed points)" : "") << "; ";
      if (t.d_fin == 1) info(t.label() + fmt(": max |d - analytic| in the b_ho/r_1D form %.3f (informational)", dev1));
    }
    for (Transition t : two_body) {
      const auto c = build_translation_curve(t, 2, preset("G-small"), ratios, SweepVariable::ratio2d);
      double dev = 0.0;
      for (const auto& pt : c.points)
        if (pt.d) dev = std::max(dev, std::abs(*pt.d - *pt.d_analytic));
      info(t.label() + fmt(": G-small max |d - analytic| %.3f (informational)", dev));
    }
    detail = "max |d - analytic| per transition: " + os.str() + "band 0.15";
    return ok;
  });

  criterion(7, "2to1 fitted scale vs closed form for b_ho/r_2D <= 1", [&](std::string& detail) {
    if (large.size() != 3) throw std::runtime_error("criterion 6 curves unavailable");
    double worst = 0.0;
    int used = 0;
    for (const auto& pt : large[2].points) {
      if (pt.over_r2d > 1.0 + 1e-12) continue;
      if (!pt.s) throw std::runtime_error("point without fitted s: " + pt.status);
      ++used;
      const double r = rel(*pt.s, *pt.s_analytic);
      worst = std::max(worst, r);
      info(fmt("b_ho/r_2D = %.3f", pt.over_r2d) + fmt(": s_fit = %.4f", *pt.s) + fmt(", s_analytic = %.4f", *pt.s_analytic));
    }
    detail = fmt("max relative deviation %.3f over ", worst) + std::to_string(used) + " points, band 0.05";
    return used > 0 && worst <= 0.05;
  });

  criterion(8, "three-body E_d(d) and universality", [&](std::string& detail) {
    bool monotone = true, continuous = true, endpoint = true;
    double worst_end = 0.0;
    for (const auto& name : short_range_preset_names()) {
      const auto p = preset(name);
      double prev = -kInfinity;
      for (int i = 1; i <= 40; ++i) {
        const double d = 1.0 + 0.05 * i;
        const double E = d_energy(3, d, p);
        if (E < prev - 1e-9) monotone = false;
        prev = E;
      }
      for (double d : {1.2, 2.0, 2.8}) {
        const double E = d_energy(3, d, p);
        const double small = std::abs(d_energy(3, d + 1e-4, p) - E);
        const double wide = std::abs(d_energy(3, d + 1e-2, p) - E);
        if (small > 0.05 * wide + 1e-9) continuous = false;
      }
      const double E1 = d_energy(3, 1.0, p);
      const double near = d_energy(3, 1.0 + 1e-6, p);
      worst_end = std::max(worst_end, rel(near, E1));
    }
    endpoint = worst_end <= 1e-4;
    std::vector<TranslationCurve> three, two;
    for (const auto& name : short_range_preset_names()) {
      three.push_back(build_translation_curve({3, 1}, 3, preset(name), ratios, SweepVariable::ratio2d));
      two.push_back(build_translation_curve({3, 2}, 2, preset(name), {0.5, 1.0, 2.0, 3.0}, SweepVariable::ratio2d));
    }
    const auto m3 = universality_metric(three);
    const auto m2 = universality_metric(two);
    info(fmt("N=3 3to1 spread vs b_ho/r_2D %.4f, vs b_ho %.4f", m3.spread_scaled, m3.spread_raw));
    info(fmt("N=2 3to2 spread vs b_ho/r_2D %.4f, vs b_ho %.4f", m2.spread_scaled, m2.spread_raw));
    detail = std::string(monotone ? "monotone" : "NOT monotone") + ", " + (continuous ? "continuous" : "NOT continuous") +
             fmt(", d=1 endpoint rel err %.1e", worst_end) + ", universality " +
             (m3.holds() && m2.holds() ? "holds" : "fails");
    return monotone && continuous && endpoint && m3.holds() && m2.holds();
  });

  criterion(9, "d-solver vs shooting at d = 3", [&](std::string& detail) {
    double worst = 0.0;
    std::ostringstream os;
    for (const char* name : {"G-small", "G-large"}) {
      const auto p = preset(name);
      const double E = d_energy(2, 3.0, p);
      const double ref = shooting_ground_energy(p);
      worst = std::max(worst, rel(E, ref));
      os << name << fmt(" %.10f", E) << fmt(" vs %.10f; ", ref);
    }
    detail = os.str() + fmt("max rel err %.2e", worst);
    return worst <= 1e-6;
  });

  criterion(10, "curve output independent of parallelism", [&](std::string& detail) {
    RunConfig c;
    c.command = "curve";
    c.transition = {3, 1};
    c.potential = preset("G-large");
    c.sweep.count = 6;
    std::string first;
    bool same = true;
    for (int jobs : {1, 4, 8}) {
      c.jobs = jobs;
      std::ostringstream os;
      cmd_curve(c, os);
      if (jobs == 1) first = os.str();
      else same &= os.str() == first;
    }
    detail = std::string(same ? "byte-identical" : "outputs differ") + " for jobs 1, 4, 8 (" +
             std::to_string(first.size()) + " bytes)";
    return same && !first.empty();
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "PASSED", failures);
  return failures ? 1 : 0;
}
