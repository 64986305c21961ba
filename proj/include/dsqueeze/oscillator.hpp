#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dsqueeze/errors.hpp"
#include "dsqueeze/potentials.hpp"
#include "dsqueeze/units.hpp"

namespace dsq {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

using Frequencies = std::array<double, 3>;  // (omega_x, omega_y, omega_z), entries may be +inf

/// Transition from integer dimension d_ini to d_fin < d_ini.
struct Transition {
  int d_ini = 3;
  int d_fin = 2;

  void validate() const {
    if (d_ini < 1 || d_ini > 3 || d_fin < 0 || d_fin > 2)
      throw DomainError("Transition: dimensions out of range");
    if (d_fin >= d_ini) throw DomainError("Transition: need d_fin < d_ini");
  }
  int squeezed() const { return d_ini - d_fin; }
  std::string label() const { return std::to_string(d_ini) + "to" + std::to_string(d_fin); }
  bool operator==(const Transition& o) const { return d_ini == o.d_ini && d_fin == o.d_fin; }
};

inline Transition parse_transition(const std::string& s) {
  // accepts "3to2", "3D->2D", "3-2"
  std::vector<int> digits;
  for (char c : s)
    if (c >= '0' && c <= '9') digits.push_back(c - '0');
  if (digits.size() != 2) throw DomainError("cannot parse transition '" + s + "'");
  Transition t{digits[0], digits[1]};
  t.validate();
  return t;
}

inline std::vector<Transition> all_transitions() {
  return {{3, 2}, {3, 1}, {3, 0}, {2, 1}, {2, 0}, {1, 0}};
}

/**
 * Deformed trap for a transition. Directions beyond d_ini are excluded (infinite
 * frequency), the next (d_ini - d_fin) are squeezed with the common frequency omega_ho and
 * the remaining d_fin are untouched. Directions are filled as z, then y, then x, so that
 * 3D->2D squeezes z and 3D->1D squeezes x and y.
 */
struct SqueezeScenario {
  Transition transition;
  Frequencies omega{0.0, 0.0, 0.0};

  static SqueezeScenario symmetric(Transition t, double omega_ho) {
    t.validate();
    if (omega_ho < 0.0) throw DomainError("SqueezeScenario: negative frequency");
    SqueezeScenario s;
    s.transition = t;
    const int excluded = 3 - t.d_ini;
    const int squeezed = t.squeezed();
    // slots in filling order: z (2), y (1), x (0) for excluded then squeezed
    int slot = 2;
    for (int i = 0; i < excluded; ++i) s.omega[slot--] = kInfinity;
    if (t.d_ini == 3 && squeezed == 2) {
      // 3D->1D: squeeze x and y, z untouched
      s.omega = {omega_ho, omega_ho, 0.0};
      return s;
    }
    for (int i = 0; i < squeezed; ++i) s.omega[slot--] = omega_ho;
    return s;
  }

  void validate() const {
    transition.validate();
    int inf = 0, zero = 0;
    for (double w : omega) {
      if (w < 0.0 || std::isnan(w)) throw DomainError("SqueezeScenario: invalid frequency");
      if (std::isinf(w)) ++inf;
      if (w == 0.0) ++zero;
    }
    if (inf != 3 - transition.d_ini)
      throw DomainError("SqueezeScenario: wrong number of excluded directions");
    if (zero < transition.d_fin)
      throw DomainError("SqueezeScenario: too few untouched directions");
  }

  /// Common squeezing frequency (largest finite entry).
  double omega_ho() const {
    double w = 0.0;
    for (double x : omega)
      if (std::isfinite(x)) w = std::max(w, x);
    return w;
  }

  /// b_ho^2 = hbar / (m omega_ho); infinite when there is no squeezing.
  double b_ho() const {
    const double w = omega_ho();
    return w > 0.0 ? oscillator_length(w) : kInfinity;
  }
};

/// Occupation numbers of the relative oscillator modes.
struct OccupationSet {
  int n_r_d = 0;
  std::array<double, 3> n_av{0.0, 0.0, 0.0};
  std::optional<std::array<std::vector<int>, 3>> per_mode;

  static OccupationSet ground() { return {}; }

  static OccupationSet from_modes(const std::array<std::vector<int>, 3>& modes, int n_r_d = 0) {
    OccupationSet o;
    o.n_r_d = n_r_d;
    o.per_mode = modes;
    for (int q = 0; q < 3; ++q) {
      double s = 0.0;
      for (int n : modes[q]) {
        if (n < 0) throw DomainError("OccupationSet: negative occupation");
        s += n;
      }
      o.n_av[q] = modes[q].empty() ? 0.0 : s / static_cast<double>(modes[q].size());
    }
    return o;
  }

  void validate(int N) const {
    if (n_r_d < 0) throw DomainError("OccupationSet: negative radial node count");
    for (double n : n_av)
      if (n < 0.0) throw DomainError("OccupationSet: negative average occupation");
    if (per_mode)
      for (const auto& m : *per_mode)
        if (static_cast<int>(m.size()) != N - 1)
          throw DomainError("OccupationSet: per-mode lists must have N-1 entries");
  }

  bool is_ground() const {
    return n_r_d == 0 && n_av[0] == 0.0 && n_av[1] == 0.0 && n_av[2] == 0.0;
  }

  /// sum_{i=1}^{N-1} (n_q(i) + 1/2)
  double mode_sum(int q, int N) const { return (N - 1) * (n_av[q] + 0.5); }
};

// ---------------------------------------------------------------------------------------

/// f(x) = sqrt(1+x^2) - x for x = omega/omega_pp in [0, inf]; f(0) = 1, f(inf) = 0.
inline double squeeze_factor(double x) {
  if (x < 0.0 || std::isnan(x)) throw DomainError("squeeze_factor: ratio must be >= 0");
  if (std::isinf(x)) return 0.0;
  return 1.0 / (std::sqrt(1.0 + x * x) + x);
}

namespace detail {
inline void check_omega_pp(double omega_pp) {
  if (!(omega_pp > 0.0)) throw DomainError("omega_pp must be positive");
}
inline void check_frequencies(const Frequencies& w) {
  for (double x : w)
    if (x < 0.0 || std::isnan(x)) throw DomainError("trap frequencies must be >= 0");
}
inline double ratio(double omega, double omega_pp) {
  return std::isinf(omega) ? kInfinity : omega / omega_pp;
}
}  // namespace detail

/// Identical-boson ground state: d = sum_q f(omega_q / omega_pp), independent of N.
inline double dimension_from_frequencies(const Frequencies& omega, double omega_pp) {
  detail::check_omega_pp(omega_pp);
  detail::check_frequencies(omega);
  double d = 0.0;
  for (double w : omega) d += squeeze_factor(detail::ratio(w, omega_pp));
  return d;
}

/// d = -4 n_r/(N-1) + sum_q (2 n_q^av + 1) f(omega_q / omega_pp).
inline double dimension_general(const OccupationSet& occ, const Frequencies& omega,
                                double omega_pp, int N) {
  if (N < 2) throw DomainError("dimension_general: N must be >= 2");
  detail::check_omega_pp(omega_pp);
  detail::check_frequencies(omega);
  occ.validate(N);
  double d = -4.0 * occ.n_r_d / (N - 1);
  for (int q = 0; q < 3; ++q)
    d += (2.0 * occ.n_av[q] + 1.0) * squeeze_factor(detail::ratio(omega[q], omega_pp));
  return d;
}

/// Symmetric squeezing: d = d_fin + (d_ini - d_fin) f(x).
inline double symmetric_dimension(Transition t, double x) {
  t.validate();
  return t.d_fin + t.squeezed() * squeeze_factor(x);
}

/**
 * Inverse of symmetric_dimension:
 *   x = (d_ini - d)(d_ini + d - 2 d_fin) / (2 (d - d_fin)(d_ini - d_fin)).
 * The closed interval is accepted: d_ini maps to 0 and d_fin to +inf.
 */
inline double frequency_ratio_from_dimension(Transition t, double d) {
  t.validate();
  if (!(d >= t.d_fin && d <= t.d_ini))
    throw DomainError("frequency_ratio_from_dimension: d outside [d_fin, d_ini]");
  if (d == t.d_fin) return kInfinity;
  const double num = (t.d_ini - d) * (t.d_ini + d - 2.0 * t.d_fin);
  const double den = 2.0 * (d - t.d_fin) * t.squeezed();
  return num / den;
}

/// Same relation in terms of lengths: b_pp^2 / b_ho^2 = x.
inline double bho_over_bpp_from_dimension(Transition t, double d) {
  const double x = frequency_ratio_from_dimension(t, d);
  return x == 0.0 ? kInfinity : 1.0 / std::sqrt(x);
}

/// E_ext / (hbar omega_pp) = sum_q f(omega_q/omega_pp) sum_i (n_q(i) + 1/2).
inline double energy_ext_ho(const Frequencies& omega, double omega_pp, const OccupationSet& occ,
                            int N) {
  if (N < 2) throw DomainError("energy_ext_ho: N must be >= 2");
  detail::check_omega_pp(omega_pp);
  detail::check_frequencies(omega);
  occ.validate(N);
  double e = 0.0;
  for (int q = 0; q < 3; ++q) {
    const double f = squeeze_factor(detail::ratio(omega[q], omega_pp));
    if (f == 0.0) continue;
    e += f * occ.mode_sum(q, N);
  }
  return e;
}

/**
 * Zero-point energy of the relative modes, hbar sum_q omega_q sum_i (n_q(i) + 1/2), taken
 * over directions with finite frequency only. Excluded (infinite) directions carry no
 * finite zero-point term; they are removed from both E_rel and E_0.
 */
inline double zero_point_energy(const Frequencies& omega, int N,
                                const OccupationSet& occ = OccupationSet::ground()) {
  if (N < 2) throw DomainError("zero_point_energy: N must be >= 2");
  detail::check_frequencies(omega);
  occ.validate(N);
  double e = 0.0;
  for (int q = 0; q < 3; ++q) {
    if (std::isinf(omega[q]) || omega[q] == 0.0) continue;
    e += UnitSystem::hbar * omega[q] * occ.mode_sum(q, N);
  }
  return e;
}

/// E_d = hbar omega_pp (2 n_r + (N-1) d / 2).
inline double energy_d_ho(int N, double d, int n_r, double omega_pp) {
  if (N < 2) throw DomainError("energy_d_ho: N must be >= 2");
  if (!(d > 0.0)) throw DomainError("energy_d_ho: d must be positive");
  if (n_r < 0) throw DomainError("energy_d_ho: n_r must be >= 0");
  detail::check_omega_pp(omega_pp);
  return UnitSystem::hbar * omega_pp * (2.0 * n_r + 0.5 * (N - 1) * d);
}

/// 1/s_q^2 = sqrt(1 + omega_q^2/omega_pp^2); s = 1 untouched, s = 0 excluded.
inline std::array<double, 3> scale_factors(const Frequencies& omega, double omega_pp) {
  detail::check_omega_pp(omega_pp);
  detail::check_frequencies(omega);
  std::array<double, 3> s{};
  for (int q = 0; q < 3; ++q) {
    if (std::isinf(omega[q])) {
      s[q] = 0.0;
      continue;
    }
    const double x = omega[q] / omega_pp;
    s[q] = std::pow(1.0 + x * x, -0.25);
  }
  return s;
}

/// Scale factor of a squeezed direction at frequency ratio x.
inline double scale_from_ratio(double x) {
  if (x < 0.0 || std::isnan(x)) throw DomainError("scale_from_ratio: ratio must be >= 0");
  if (std::isinf(x)) return 0.0;
  return std::pow(1.0 + x * x, -0.25);
}

// ---------------------------------------------------------------------------------------
// b_ho in units of the oscillator rms radii

struct BhoRatios {
  double over_r2d = 0.0;
  std::optional<double> over_r1d;
};

/**
 * b_ho/r_2D (and b_ho/r_1D for transitions ending in 1D) as closed forms of d.
 * Supported: N = 2 with 3->2, 3->1, 2->1; N = 3 with 3->2, 3->1.
 */
inline BhoRatios bho_over_rms(Transition t, double d, int N) {
  t.validate();
  const bool n2 = N == 2 && ((t == Transition{3, 2}) || (t == Transition{3, 1}) || (t == Transition{2, 1}));
  const bool n3 = N == 3 && ((t == Transition{3, 2}) || (t == Transition{3, 1}));
  if (!n2 && !n3) throw UnsupportedError("bho_over_rms: unsupported (transition, N) pair");
  if (!(d > t.d_fin && d < t.d_ini)) throw DomainError("bho_over_rms: d must lie strictly inside the transition");
  BhoRatios r;
  if (t == Transition{3, 2}) {
    const double c = (N == 2) ? 2.0 : 3.0;
    r.over_r2d = std::sqrt(c * (d - 2.0) / ((3.0 - d) * (d - 1.0)));
  } else if (t == Transition{3, 1}) {
    const double c2 = (N == 2) ? 4.0 : 6.0;
    const double c1 = (N == 2) ? 8.0 : 12.0;
    r.over_r2d = std::sqrt(c2 * (d - 1.0) / ((3.0 - d) * (d + 1.0)));
    r.over_r1d = std::sqrt(c1 * (d - 1.0) / ((3.0 - d) * (d + 1.0)));
  } else {  // 2->1, N = 2
    r.over_r2d = std::sqrt(2.0 * (d - 1.0) / (d * (2.0 - d)));
    r.over_r1d = std::sqrt(4.0 * (d - 1.0) / (d * (2.0 - d)));
  }
  return r;
}

enum class RmsUnit { r2d, r1d };

/// Frequency ratio x = b_pp^2/b_ho^2 from b_ho in units of the oscillator r_2D or r_1D.
inline double frequency_ratio_from_bho(int N, double bho_over_r, RmsUnit unit) {
  if (!(bho_over_r > 0.0)) throw DomainError("frequency_ratio_from_bho: ratio must be positive");
  const auto [r2, r1] = ho_rms_radii(N, 1.0);
  const double r = unit == RmsUnit::r2d ? r2 : r1;
  if (std::isinf(bho_over_r)) return 0.0;
  const double b_ho = bho_over_r * r;  // in units of b_pp
  return 1.0 / (b_ho * b_ho);
}

/**
 * Scale parameter of the squeezed directions from b_ho in rms units:
 *   N = 2: 1/s^2 = sqrt(1 + (r_2D/b_ho)^4) = sqrt(1 + 4 (r_1D/b_ho)^4)
 *   N = 3: 1/s^2 = sqrt(1 + 9/4 (r_2D/b_ho)^4) = sqrt(1 + 9 (r_1D/b_ho)^4)
 */
inline double scale_from_bho(Transition t, int N, double bho_over_r, RmsUnit unit) {
  t.validate();
  if (N != 2 && N != 3) throw UnsupportedError("scale_from_bho: only N = 2 and N = 3 are supported");
  if (!(bho_over_r > 0.0)) throw DomainError("scale_from_bho: ratio must be positive");
  if (std::isinf(bho_over_r)) return 1.0;
  const double q = 1.0 / bho_over_r;
  const double q4 = q * q * q * q;
  double c;
  if (N == 2) {
    c = unit == RmsUnit::r2d ? 1.0 : 4.0;
  } else {
    c = unit == RmsUnit::r2d ? 2.25 : 9.0;
  }
  return std::pow(1.0 + c * q4, -0.25);
}

// ---------------------------------------------------------------------------------------
// analytic wave functions

/// Generalized angular momentum l_{d,N} = ((N-1) d - 3)/2.
inline double generalized_angular_momentum(int N, double d) {
  if (N < 2) throw DomainError("generalized_angular_momentum: N must be >= 2");
  if (!(d > 0.0)) throw DomainError("generalized_angular_momentum: d must be positive");
  return ((N - 1) * d - 3.0) / 2.0;
}

/// Generalized Laguerre polynomial L_n^a(x).
inline double laguerre(int n, double a, double x) {
  if (n == 0) return 1.0;
  double lm1 = 1.0, l = 1.0 + a - x;
  for (int k = 2; k <= n; ++k) {
    const double next = ((2.0 * k - 1.0 + a - x) * l - (k - 1.0 + a) * lm1) / k;
    lm1 = l;
    l = next;
  }
  return l;
}

/**
 * Normalized hyperradial oscillator solution including the rho^{l+1} envelope:
 *   F(rho) = N_d rho^{l+1} exp(-rho^2/2b^2) L_{n_r}^{l+1/2}(rho^2/b^2),  int_0^inf F^2 drho = 1.
 */
inline std::function<double(double)> d_ho_radial(int N, double d, int n_r, double b_pp) {
  const double l = generalized_angular_momentum(N, d);
  if (!(l + 1.5 > 0.0)) throw DomainError("d_ho_radial: l + 3/2 must be positive");
  if (n_r < 0) throw DomainError("d_ho_radial: n_r must be >= 0");
  if (!(b_pp > 0.0)) throw DomainError("d_ho_radial: b_pp must be positive");
  const double a = l + 0.5;
  // int rho^{2l+2} e^{-rho^2/b^2} L^2 drho = b^{2l+3}/2 Gamma(n+l+3/2)/n!
  const double log_norm2 = (2.0 * l + 3.0) * std::log(b_pp) - std::log(2.0) +
                           std::lgamma(n_r + l + 1.5) - std::lgamma(n_r + 1.0);
  const double norm = std::exp(-0.5 * log_norm2);
  return [=](double rho) {
    if (rho <= 0.0) return (l + 1.0 == 0.0) ? norm : 0.0;
    const double y = rho / b_pp;
    return norm * std::pow(rho, l + 1.0) * std::exp(-0.5 * y * y) * laguerre(n_r, a, y * y);
  };
}

/**
 * Ground state of one relative (Jacobi) vector in the deformed trap plus oscillator pair
 * interaction, in mass-weighted coordinates: product of Gaussians with
 * b_q^2 = hbar / (m sqrt(omega_q^2 + omega_pp^2)). Excluded directions are dropped, so the
 * returned callable takes the coordinates of the active directions only, in x, y, z order.
 * For N bosons the full relative function is the product over the N-1 Jacobi vectors.
 */
inline std::function<double(const std::vector<double>&)> ext_ho_ground(const Frequencies& omega,
                                                                      double omega_pp) {
  detail::check_omega_pp(omega_pp);
  detail::check_frequencies(omega);
  std::vector<double> b2;
  for (double w : omega) {
    if (std::isinf(w)) continue;
    b2.push_back(UnitSystem::hbar / (UnitSystem::mass * std::sqrt(w * w + omega_pp * omega_pp)));
  }
  return [b2](const std::vector<double>& q) {
    if (q.size() != b2.size()) throw DomainError("ext_ho_ground: wrong number of coordinates");
    double v = 1.0;
    for (std::size_t i = 0; i < b2.size(); ++i)
      v *= std::pow(M_PI * b2[i], -0.25) * std::exp(-0.5 * q[i] * q[i] / b2[i]);
    return v;
  };
}

}  // namespace dsq
