#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "dsqueeze/errors.hpp"
#include "dsqueeze/units.hpp"

namespace dsq {

enum class PotentialKind { harmonic, gaussian, morse };

inline std::string to_string(PotentialKind k) {
  switch (k) {
    case PotentialKind::harmonic: return "harmonic";
    case PotentialKind::gaussian: return "gaussian";
    case PotentialKind::morse: return "morse";
  }
  return "harmonic";
}

inline PotentialKind potential_kind_from_string(const std::string& s) {
  if (s == "harmonic") return PotentialKind::harmonic;
  if (s == "gaussian") return PotentialKind::gaussian;
  if (s == "morse") return PotentialKind::morse;
  throw DomainError("unknown potential kind '" + s + "'");
}

/**
 * Central particle-particle interaction.
 *
 *  - gaussian: V(r) = V0 exp(-r^2 / b_pot^2), V0 < 0 attracts
 *  - morse:    V(r) = V0 (exp(-2(r-r0)/b_pot) - 2 exp(-(r-r0)/b_pot)), V0 > 0 is the well depth
 *  - harmonic: V(r) = 1/2 omega_pp^2 (m^2/M) r^2 with M = N m, so that the pair sum over N
 *              equal-mass particles is 1/2 m omega_pp^2 rho^2 (m_i m_j / M, not the reduced mass)
 */
struct PairPotential {
  PotentialKind kind = PotentialKind::harmonic;
  double V0 = 0.0;
  double b_pot = 1.0;
  double r0 = 0.0;
  double omega_pp = 1.0;
  std::string name;

  void validate() const {
    if (!(b_pot > 0.0)) throw DomainError("PairPotential: b_pot must be positive");
    if (kind == PotentialKind::harmonic && !(omega_pp > 0.0))
      throw DomainError("PairPotential: omega_pp must be positive for the harmonic kind");
  }

  bool short_range() const { return kind != PotentialKind::harmonic; }

  /// Distance beyond which the interaction is below ~1e-13 of its scale.
  double cutoff_radius() const {
    switch (kind) {
      case PotentialKind::gaussian: return b_pot * std::sqrt(32.0);
      case PotentialKind::morse: return r0 + 32.0 * b_pot;
      case PotentialKind::harmonic: return std::numeric_limits<double>::infinity();
    }
    return std::numeric_limits<double>::infinity();
  }

  /// Lower bound of V(r) over r >= 0.
  double minimum() const {
    switch (kind) {
      case PotentialKind::gaussian: return std::min(V0, 0.0);
      case PotentialKind::morse: return -std::abs(V0);
      case PotentialKind::harmonic: return 0.0;
    }
    return 0.0;
  }

  /// Same shape with the strength multiplied by eps (omega_pp^2 for the harmonic kind).
  PairPotential scaled(double eps) const {
    PairPotential p = *this;
    if (kind == PotentialKind::harmonic) {
      p.omega_pp = omega_pp * std::sqrt(eps);
    } else {
      p.V0 = V0 * eps;
    }
    return p;
  }

  bool operator==(const PairPotential& o) const {
    return kind == o.kind && V0 == o.V0 && b_pot == o.b_pot && r0 == o.r0 && omega_pp == o.omega_pp;
  }
};

/// V(r) for a pair inside an N-body system of equal masses m.
inline double evaluate(const PairPotential& p, double r, int N = 2, double m = UnitSystem::mass) {
  if (r < 0.0) throw DomainError("evaluate: negative pair distance");
  switch (p.kind) {
    case PotentialKind::gaussian: {
      const double x = r / p.b_pot;
      return p.V0 * std::exp(-x * x);
    }
    case PotentialKind::morse: {
      const double e = std::exp(-(r - p.r0) / p.b_pot);
      return p.V0 * (e * e - 2.0 * e);
    }
    case PotentialKind::harmonic: {
      if (N < 2) throw DomainError("evaluate: harmonic pair needs N >= 2");
      const double total_mass = N * m;
      return 0.5 * p.omega_pp * p.omega_pp * (m * m / total_mass) * r * r;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------------------
// presets

/// Shipped presets. Scattering lengths (units of b_pot, equal boson masses):
///   G-small ~ 1.03, G-large ~ 10.5, M-small ~ 1.06, M-large ~ 10.2.
/// Morse minima sit at r0 = 0.5 b_pot, so the wells have no repulsive core.
/// Each supports exactly one two-body s-wave bound state in 3D.
inline std::vector<std::string> preset_names() {
  return {"G-small", "G-large", "M-small", "M-large", "harmonic"};
}

inline std::vector<std::string> short_range_preset_names() {
  return {"G-small", "G-large", "M-small", "M-large"};
}

inline PairPotential preset(const std::string& name) {
  PairPotential p;
  p.name = name;
  if (name == "G-small") {
    p.kind = PotentialKind::gaussian;
    p.V0 = -10.0;
  } else if (name == "G-large") {
    p.kind = PotentialKind::gaussian;
    p.V0 = -3.0;
  } else if (name == "M-small") {
    p.kind = PotentialKind::morse;
    p.V0 = 2.07;
    p.r0 = 0.5;
  } else if (name == "M-large") {
    p.kind = PotentialKind::morse;
    p.V0 = 0.723;
    p.r0 = 0.5;
  } else if (name == "harmonic") {
    p.kind = PotentialKind::harmonic;
    p.omega_pp = 1.0;
  } else {
    throw DomainError("unknown potential preset '" + name + "'");
  }
  return p;
}

// ---------------------------------------------------------------------------------------
// zero-energy scattering

/// Zero-energy radial solution u(r) on a uniform mesh, u'' = 2 mu V(r) u, u(0) = 0.
inline std::vector<double> zero_energy_solution(const PairPotential& p, double reduced_mass,
                                                double r_max, double h) {
  const int n = static_cast<int>(std::ceil(r_max / h));
  h = r_max / n;
  std::vector<double> u(n + 1);
  auto q = [&](double r) { return 2.0 * reduced_mass * evaluate(p, r); };
  // Numerov for u'' = q u
  const double c = h * h / 12.0;
  u[0] = 0.0;
  u[1] = h;
  double w_prev = (1.0 - c * q(0.0)) * u[0];
  double w_curr = (1.0 - c * q(h)) * u[1];
  for (int i = 1; i < n; ++i) {
    const double r = i * h;
    const double w_next = 2.0 * w_curr - w_prev + h * h * q(r) * u[i];
    const double rn = (i + 1) * h;
    u[i + 1] = w_next / (1.0 - c * q(rn));
    w_prev = w_curr;
    w_curr = w_next;
    if (std::abs(u[i + 1]) > 1e200) {
      const double s = 1e-200;
      for (int j = 0; j <= i + 1; ++j) u[j] *= s;
      w_prev *= s;
      w_curr *= s;
    }
  }
  return u;
}

/**
 * 3D s-wave scattering length from the asymptote of the zero-energy solution,
 * u(r) -> C (r - a), obtained by a least-squares line through the tail of u.
 */
inline double scattering_length_3d(const PairPotential& p, double reduced_mass = 0.5) {
  p.validate();
  if (!p.short_range())
    throw UnsupportedError("scattering_length_3d: harmonic interaction is not short range");
  if (p.V0 == 0.0) return 0.0;
  const double r_tail = p.cutoff_radius();
  const double window = 10.0 * p.b_pot;
  const double r_max = r_tail + window;
  const double h = 1e-3 * p.b_pot;
  const auto u = zero_energy_solution(p, reduced_mass, r_max, h);
  const int n = static_cast<int>(u.size()) - 1;
  const double dr = r_max / n;
  const int i0 = static_cast<int>(std::ceil(r_tail / dr));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int i = i0; i <= n; ++i) {
    const double r = i * dr;
    sx += r;
    sy += u[i];
    sxx += r * r;
    sxy += r * u[i];
    ++m;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / m;
  return -intercept / slope;
}

/// Closed-form rms radii of the oscillator bound state at d = 2 and d = 1, as used for
/// normalizing the squeezing length: N = 2 -> (b_pp, b_pp/sqrt2); N = 3 -> (b_pp sqrt(2/3), b_pp/sqrt3).
inline std::pair<double, double> ho_rms_radii(int N, double b_pp) {
  if (!(b_pp > 0.0)) throw DomainError("ho_rms_radii: b_pp must be positive");
  if (N == 2) return {b_pp, b_pp / std::sqrt(2.0)};
  if (N == 3) return {b_pp * std::sqrt(2.0 / 3.0), b_pp * std::sqrt(1.0 / 3.0)};
  throw UnsupportedError("ho_rms_radii: only N = 2 and N = 3 are supported");
}

}  // namespace dsq
