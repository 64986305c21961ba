#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "dsqueeze/d_solver.hpp"
#include "dsqueeze/errors.hpp"
#include "dsqueeze/ext_solver.hpp"
#include "dsqueeze/oscillator.hpp"
#include "dsqueeze/parallel.hpp"
#include "dsqueeze/potentials.hpp"

namespace dsq {

// ---------------------------------------------------------------------------------------
// energy matching

struct MatchOptions {
  double tolerance = 1e-7;  // |E_d(d) - E_target|
  int K_max = 12;
  GridSpec grid;
};

struct MatchResult {
  double d = 0.0;
  double E_d = 0.0;
  int evaluations = 0;
};

inline HyperradialProblem d_problem(int N, double d, const PairPotential& p, const MatchOptions& o) {
  HyperradialProblem pb;
  pb.N = N;
  pb.d = d;
  pb.potential = p;
  pb.K_max = N == 3 ? o.K_max : 0;
  pb.grid = o.grid;
  return pb;
}

inline double d_energy(int N, double d, const PairPotential& p, const MatchOptions& o = {}) {
  return solve_ground(d_problem(N, d, p, o)).energy;
}

/**
 * d in [d_lo, d_hi] with E_d(d) = E_target by bisection; E_d is nondecreasing in d.
 * Known endpoint energies may be passed to skip their solves.
 */
inline MatchResult match_dimension(double E_target, int N, const PairPotential& p, double d_lo,
                                   double d_hi, const MatchOptions& o = {},
                                   std::optional<double> E_lo_known = std::nullopt,
                                   std::optional<double> E_hi_known = std::nullopt) {
  if (!(d_lo < d_hi)) throw DomainError("match_dimension: need d_lo < d_hi");
  if (!std::isfinite(E_target)) throw DomainError("match_dimension: target energy is not finite");
  MatchResult r;
  auto energy = [&](double d) {
    ++r.evaluations;
    return d_energy(N, d, p, o);
  };
  const double E_lo = E_lo_known ? *E_lo_known : energy(d_lo);
  const double E_hi = E_hi_known ? *E_hi_known : energy(d_hi);
  if (E_lo > E_hi + o.tolerance) {
    std::ostringstream os;
    os.precision(12);
    os << "match_dimension: E_d is not monotone on [" << d_lo << ", " << d_hi << "]: E(lo) = " << E_lo
       << ", E(hi) = " << E_hi;
    throw NumericError(os.str());
  }
  if (E_target < E_lo - o.tolerance || E_target > E_hi + o.tolerance) {
    std::ostringstream os;
    os.precision(12);
    os << "match_dimension: target " << E_target << " outside [E_d(" << d_lo << ") = " << E_lo
       << ", E_d(" << d_hi << ") = " << E_hi << "]";
    throw BracketError(os.str(), E_lo, E_hi);
  }
  if (std::abs(E_target - E_hi) < o.tolerance) return {d_hi, E_hi, r.evaluations};
  if (std::abs(E_target - E_lo) < o.tolerance) return {d_lo, E_lo, r.evaluations};
  double a = d_lo, b = d_hi, Ea = E_lo, Eb = E_hi;
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    const double Em = energy(m);
    if (Em < Ea - o.tolerance || Em > Eb + o.tolerance) {
      std::ostringstream os;
      os.precision(12);
      os << "match_dimension: non-monotone E_d at d = " << m << " (E = " << Em << ")";
      throw NumericError(os.str());
    }
    if (Em < E_target) {
      a = m;
      Ea = Em;
    } else {
      b = m;
      Eb = Em;
    }
    // stop once the energy is matched well inside the tolerance and d is pinned down
    if (std::abs(Em - E_target) < 0.01 * o.tolerance || b - a < 1e-11) {
      r.d = m;
      r.E_d = Em;
      return r;
    }
  }
  r.d = 0.5 * (a + b);
  r.E_d = 0.5 * (Ea + Eb);
  return r;
}

// ---------------------------------------------------------------------------------------
// deformed d-function and overlaps

/// Scale factors (x, y, z) of a symmetric squeeze with scalar s; excluded directions get 0.
inline std::array<double, 3> symmetric_scales(Transition t, double s) {
  const auto sc = SqueezeScenario::symmetric(t, 1.0);
  std::array<double, 3> out{};
  for (int q = 0; q < 3; ++q) out[q] = std::isinf(sc.omega[q]) ? 0.0 : (sc.omega[q] > 0.0 ? s : 1.0);
  return out;
}

/**
 * Two-body d-function reinterpreted in the d_ini-dimensional space of the transition with
 * deformed hyperradius rho~^2 = sum_q rho_q^2 / s_q^2 (active directions), renormalized.
 * For N = 2 the d-dimensional amplitude is g(rho) = F(rho) / rho^{(d-1)/2}.
 */
class DeformedDFunction {
 public:
  DeformedDFunction(const HyperradialSolution& sol, std::array<double, 3> s, Transition t)
      : sol_(&sol), s_(s), t_(t) {
    if (sol.N != 2) throw UnsupportedError("deformed_d_wavefunction: defined for N = 2");
    geometry_of(t);
    const int D = t.d_ini;
    double prod = 1.0;  // active directions: x, y, z for D = 3 and x, y for D = 2
    for (int q = 0; q < D; ++q) {
      if (!(s[q] > 0.0)) throw DomainError("deformed_d_wavefunction: scale factors must be positive");
      prod *= s[q];
    }
    const double solid = D == 3 ? 4.0 * M_PI : 2.0 * M_PI;
    norm_ = std::sqrt(prod * solid * sol.g0_power_integral(D - 1.0));
  }

  /// Value at Cartesian relative coordinates (active directions).
  double at(const std::array<double, 3>& rho) const {
    double r2 = 0.0;
    for (int q = 0; q < t_.d_ini; ++q) r2 += rho[q] * rho[q] / (s_[q] * s_[q]);
    return radial(std::sqrt(r2));
  }

  /// Value at the reduced coordinates (a, b) of the transition geometry.
  double operator()(double a, double b) const {
    switch (geometry_of(t_)) {
      case ReducedGeometry::cylindrical_trap_z:
        return radial(std::sqrt(a * a / (s_[0] * s_[0]) + b * b / (s_[2] * s_[2])));
      case ReducedGeometry::cylindrical_trap_perp:
        return radial(std::sqrt(a * a / (s_[0] * s_[0]) + b * b / (s_[2] * s_[2])));
      case ReducedGeometry::planar_trap_y:
        return radial(std::sqrt(a * a / (s_[0] * s_[0]) + b * b / (s_[1] * s_[1])));
    }
    return 0.0;
  }

  double radial(double rho_tilde) const { return sol_->g(0, rho_tilde) / norm_; }

 private:
  const HyperradialSolution* sol_;
  std::array<double, 3> s_;
  Transition t_;
  double norm_ = 1.0;
};

inline DeformedDFunction deformed_d_wavefunction(const HyperradialSolution& sol, std::array<double, 3> s,
                                                 Transition t) {
  return DeformedDFunction(sol, s, t);
}

/// |<f|g>|^2 on a quadrature; both inputs must be normalized to 1e-4 on that measure.
inline double overlap(const ExtSamples& m, const std::function<double(double, double)>& f,
                      const std::function<double(double, double)>& g) {
  double ff = 0.0, gg = 0.0, fg = 0.0;
  for (std::size_t i = 0; i < m.weight.size(); ++i) {
    const double a = f(m.a[i], m.b[i]), b = g(m.a[i], m.b[i]);
    ff += m.weight[i] * a * a;
    gg += m.weight[i] * b * b;
    fg += m.weight[i] * a * b;
  }
  if (std::abs(ff - 1.0) > 1e-4 || std::abs(gg - 1.0) > 1e-4) {
    std::ostringstream os;
    os << "overlap: inputs are not normalized (norms " << ff << ", " << gg << ")";
    throw DomainError(os.str());
  }
  return std::min(1.0, fg * fg / (ff * gg));
}

struct ScaleFit {
  double s = 1.0;
  double overlap = 0.0;
  bool at_boundary = false;
};

/// Overlap of the external ground state with the deformed d-function at scale s.
inline double scale_overlap(const ExternalSolution& ext, const HyperradialSolution& sol, double s) {
  const Transition t = ext.trap.transition();
  const DeformedDFunction f(sol, symmetric_scales(t, s), t);
  const auto& m = ext.samples;
  double fg = 0.0, ee = 0.0;
  for (std::size_t i = 0; i < m.weight.size(); ++i) {
    if (m.psi[i] == 0.0) continue;
    fg += m.weight[i] * m.psi[i] * f(m.a[i], m.b[i]);
    ee += m.weight[i] * m.psi[i] * m.psi[i];
  }
  // deform-then-renormalize: f carries its exact full-space norm
  return fg * fg / ee;
}

/// Maximizes the overlap over s in [s_lo, s_hi] (Brent); flags maxima on the search boundary.
inline ScaleFit fit_scale(const ExternalSolution& ext, const HyperradialSolution& sol, double s_lo = 0.05,
                          double s_hi = 1.5) {
  auto neg = [&](double s) { return -scale_overlap(ext, sol, s); };
  std::uintmax_t iters = 200;
  const auto best = boost::math::tools::brent_find_minima(neg, s_lo, s_hi, 40, iters);
  ScaleFit fit;
  fit.s = best.first;
  fit.overlap = -best.second;
  const double edge = 1e-4 * (s_hi - s_lo);
  fit.at_boundary = fit.s - s_lo < edge || s_hi - fit.s < edge;
  return fit;
}

// ---------------------------------------------------------------------------------------
// translation curves

struct TranslationPoint {
  double b_ho = 0.0;
  double over_r2d = 0.0;
  std::optional<double> over_r1d;
  std::optional<double> d;
  std::optional<double> d_analytic;
  std::optional<double> s;
  std::optional<double> s_analytic;
  std::optional<double> overlap;
  std::optional<double> E_ext;
  std::optional<double> E_d;
  std::string status = "ok";
};

struct TranslationCurve {
  Transition transition;
  int N = 2;
  PairPotential potential;
  double r_2d = 0.0;
  std::optional<double> r_1d;
  std::vector<TranslationPoint> points;
};

enum class SweepVariable { bho, ratio2d, d };

inline std::string to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::bho: return "bho";
    case SweepVariable::ratio2d: return "ratio2d";
    case SweepVariable::d: return "d";
  }
  return "bho";
}

inline SweepVariable sweep_variable_from_string(const std::string& s) {
  if (s == "bho") return SweepVariable::bho;
  if (s == "ratio2d") return SweepVariable::ratio2d;
  if (s == "d") return SweepVariable::d;
  throw DomainError("unknown sweep variable '" + s + "'");
}

struct CurveOptions {
  MatchOptions match;
  ExtGridSpec ext_grid;
  int jobs = 1;
};

/// Conventional rms radii (r_2D, r_1D) of the potential from d = 2 and d = 1 solves.
inline std::pair<double, double> potential_rms_radii(int N, const PairPotential& p, const MatchOptions& o = {}) {
  const auto s2 = solve_ground(d_problem(N, 2.0, p, o));
  const auto s1 = solve_ground(d_problem(N, 1.0, p, o));
  if (!s2.bound || !s1.bound) throw NumericError("potential_rms_radii: no bound state at d = 2 or d = 1");
  return {rms_observables(s2).radius, rms_observables(s1).radius};
}

/// Closed-form companion at b_ho / r_2D (the potential's own r_2D in the oscillator formulas).
inline std::pair<double, double> analytic_companion(Transition t, int N, double over_r2d) {
  const double x = frequency_ratio_from_bho(N, over_r2d, RmsUnit::r2d);
  return {symmetric_dimension(t, x), scale_from_bho(t, N, over_r2d, RmsUnit::r2d)};
}

namespace detail {

inline std::string error_status(const std::exception& e, const char* kind) {
  std::string msg = e.what();
  for (char& c : msg)
    if (c == ',' || c == '\n' || c == '"') c = ';';
  return std::string(kind) + ": " + msg;
}

inline TranslationPoint two_body_point(Transition t, const PairPotential& p, double b_ho,
                                       const TranslationCurve& curve, double E_lo, double E_hi,
                                       const CurveOptions& o) {
  TranslationPoint pt;
  pt.b_ho = b_ho;
  pt.over_r2d = b_ho / curve.r_2d;
  if (curve.r_1d) pt.over_r1d = b_ho / *curve.r_1d;
  const auto [da, sa] = analytic_companion(t, 2, pt.over_r2d);
  pt.d_analytic = da;
  pt.s_analytic = sa;
  try {
    const auto trap = TrapConfig::from_bho(t, b_ho);
    const auto ext = solve_relative_ground(p, trap, o.ext_grid, E_hi);
    pt.E_ext = ext.E_ext;
    if (p.short_range() && ext.E_ext >= 0.0) {
      pt.status = "unbound";
      return pt;
    }
    const auto m = match_dimension(ext.E_ext, 2, p, t.d_fin, t.d_ini, o.match, E_lo, E_hi);
    pt.d = m.d;
    pt.E_d = m.E_d;
    const auto sol = solve_ground(d_problem(2, m.d, p, o.match));
    const auto fit = fit_scale(ext, sol);
    pt.s = fit.s;
    pt.overlap = fit.overlap;
    if (fit.at_boundary) pt.status = "scale-boundary";
  } catch (const BracketError& e) {
    pt.status = error_status(e, "bracket-error");
  } catch (const AccuracyError& e) {
    pt.status = error_status(e, "accuracy-error");
  } catch (const NumericError& e) {
    pt.status = error_status(e, "numeric-error");
  }
  return pt;
}

inline TranslationPoint three_body_point(Transition t, const PairPotential& p, double d,
                                         const TranslationCurve& curve, const CurveOptions& o) {
  TranslationPoint pt;
  const auto r = bho_over_rms(t, d, 3);
  pt.over_r2d = r.over_r2d;
  pt.over_r1d = r.over_r1d;
  pt.b_ho = r.over_r2d * curve.r_2d;
  pt.d = d;
  pt.d_analytic = d;
  pt.s_analytic = scale_from_bho(t, 3, r.over_r2d, RmsUnit::r2d);
  pt.status = "analytic-external";
  try {
    const auto sol = solve_ground(d_problem(3, d, p, o.match));
    pt.E_d = sol.energy;
    if (!sol.bound) pt.status = "unbound";
  } catch (const NumericError& e) {
    pt.status = error_status(e, "numeric-error");
  }
  return pt;
}

}  // namespace detail

/**
 * Translation curve for a list of abscissae (b_ho, b_ho/r_2D or d, per `var`).
 * N = 2 runs the full external-solve / energy-match / scale-fit pipeline per point.
 * N = 3 sweeps the d side only: b_ho comes from the closed-form oscillator relation with the
 * potential's r_2D ("analytic-external" status).
 */
inline TranslationCurve build_translation_curve(Transition t, int N, const PairPotential& p,
                                                const std::vector<double>& abscissae,
                                                SweepVariable var = SweepVariable::bho,
                                                const CurveOptions& o = {}) {
  t.validate();
  if (N != 2 && N != 3) throw UnsupportedError("build_translation_curve: N must be 2 or 3");
  if (N == 2) geometry_of(t);
  if (N == 3 && !((t == Transition{3, 2}) || (t == Transition{3, 1})))
    throw UnsupportedError("build_translation_curve: N = 3 supports 3to2 and 3to1");
  TranslationCurve c;
  c.transition = t;
  c.N = N;
  c.potential = p;
  const auto [r2, r1] = potential_rms_radii(N, p, o.match);
  c.r_2d = r2;
  if (t.d_fin == 1) c.r_1d = r1;

  // abscissae -> (b_ho for N = 2, d for N = 3)
  std::vector<double> xs;
  for (double a : abscissae) {
    if (!(a > 0.0)) throw DomainError("build_translation_curve: abscissae must be positive");
    double v = a;
    if (N == 2) {
      if (var == SweepVariable::ratio2d) v = a * r2;
      if (var == SweepVariable::d) {
        if (!(a > t.d_fin && a < t.d_ini)) throw DomainError("build_translation_curve: d outside the transition");
        v = bho_over_rms(t, a, 2).over_r2d * r2;
      }
    } else {
      if (var != SweepVariable::d) {
        const double ratio = var == SweepVariable::ratio2d ? a : a / r2;
        v = analytic_companion(t, 3, ratio).first;
      }
      if (!(v > t.d_fin && v <= t.d_ini)) throw DomainError("build_translation_curve: d outside the transition");
    }
    xs.push_back(v);
  }

  std::optional<double> E_lo, E_hi;
  if (N == 2) {
    E_lo = d_energy(2, t.d_fin, p, o.match);
    E_hi = d_energy(2, t.d_ini, p, o.match);
  }
  c.points = parallel_map(xs.size(), o.jobs, [&](std::size_t i) {
    return N == 2 ? detail::two_body_point(t, p, xs[i], c, *E_lo, *E_hi, o)
                  : detail::three_body_point(t, p, xs[i], c, o);
  });
  std::stable_sort(c.points.begin(), c.points.end(),
                   [](const TranslationPoint& a, const TranslationPoint& b) { return a.b_ho < b.b_ho; });
  return c;
}

// ---------------------------------------------------------------------------------------
// universality

struct UniversalityMetric {
  double spread_scaled = 0.0;  // max spread of d at common b_ho / r_2D
  double spread_raw = 0.0;     // max spread of d at common b_ho
  bool holds() const { return spread_scaled < spread_raw; }
};

namespace detail {

// max over a common log-spaced abscissa grid of (max_c d_c - min_c d_c), linear interpolation
inline double max_spread(const std::vector<std::vector<std::pair<double, double>>>& series) {
  double lo = 0.0, hi = kInfinity;
  for (const auto& s : series) {
    if (s.size() < 2) return 0.0;
    lo = std::max(lo, s.front().first);
    hi = std::min(hi, s.back().first);
  }
  if (!(hi > lo)) return 0.0;
  const int n = 64;
  double spread = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double x = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * k / n);
    double mn = kInfinity, mx = -kInfinity;
    for (const auto& s : series) {
      auto it = std::lower_bound(s.begin(), s.end(), x,
                                 [](const std::pair<double, double>& p, double v) { return p.first < v; });
      double y;
      if (it == s.begin()) {
        y = it->second;
      } else if (it == s.end()) {
        y = s.back().second;
      } else {
        const auto& a = *(it - 1);
        const auto& b = *it;
        y = a.second + (b.second - a.second) * (std::log(x) - std::log(a.first)) /
                           (std::log(b.first) - std::log(a.first));
      }
      mn = std::min(mn, y);
      mx = std::max(mx, y);
    }
    spread = std::max(spread, mx - mn);
  }
  return spread;
}

}  // namespace detail

/// Spread of matched d across curves against b_ho / r_2D versus against raw b_ho.
inline UniversalityMetric universality_metric(const std::vector<TranslationCurve>& curves) {
  std::vector<std::vector<std::pair<double, double>>> scaled, raw;
  for (const auto& c : curves) {
    std::vector<std::pair<double, double>> s, r;
    for (const auto& p : c.points) {
      if (!p.d) continue;
      s.emplace_back(p.over_r2d, *p.d);
      r.emplace_back(p.b_ho, *p.d);
    }
    std::sort(s.begin(), s.end());
    std::sort(r.begin(), r.end());
    scaled.push_back(std::move(s));
    raw.push_back(std::move(r));
  }
  return {detail::max_spread(scaled), detail::max_spread(raw)};
}

}  // namespace dsq
