#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "dsqueeze/bspline.hpp"
#include "dsqueeze/d_solver.hpp"
#include "dsqueeze/errors.hpp"
#include "dsqueeze/lowest_eigen.hpp"
#include "dsqueeze/oscillator.hpp"
#include "dsqueeze/potentials.hpp"
#include "dsqueeze/quadrature.hpp"

namespace dsq {

/// Symmetric squeezing of a two-body system.
struct TrapConfig {
  SqueezeScenario scenario;

  static TrapConfig symmetric(Transition t, double omega_ho) {
    return {SqueezeScenario::symmetric(t, omega_ho)};
  }
  static TrapConfig from_bho(Transition t, double b_ho) {
    if (!(b_ho > 0.0)) throw DomainError("TrapConfig: b_ho must be positive");
    return symmetric(t, std::isinf(b_ho) ? 0.0 : oscillator_frequency(b_ho));
  }
  Transition transition() const { return scenario.transition; }
  double omega_ho() const { return scenario.omega_ho(); }
  double b_ho() const { return scenario.b_ho(); }
};

/**
 * Reduced 2D coordinates (a, b) of the relative vector rho = (r1 - r2)/sqrt2 per transition:
 *   cylindrical_trap_z     3D->2D, a = |rho_perp|, b = z, trap on b, volume 2 pi a da db
 *   cylindrical_trap_perp  3D->1D, a = |rho_perp|, b = z, trap on a, volume 2 pi a da db
 *   planar_trap_y          2D->1D, a = x, b = y, trap on b, volume da db
 * Only b >= 0 (and a >= 0 in the planar case) is stored; the ground state is even.
 */
enum class ReducedGeometry { cylindrical_trap_z, cylindrical_trap_perp, planar_trap_y };

inline ReducedGeometry geometry_of(Transition t) {
  if (t == Transition{3, 2}) return ReducedGeometry::cylindrical_trap_z;
  if (t == Transition{3, 1}) return ReducedGeometry::cylindrical_trap_perp;
  if (t == Transition{2, 1}) return ReducedGeometry::planar_trap_y;
  throw UnsupportedError("external solver: transition " + t.label() + " is not a two-body symmetric case");
}

struct ExtGridSpec {
  double extent_a = 0.0;  // 0: automatic
  double extent_b = 0.0;
  double h_core = 0.0;    // spacing near the origin; 0: automatic
  double refine = 1.0;    // divides every automatic spacing
  int spline_order = 6;
  int min_points_per_range = 4;  // intervals per b_pot required near the origin
};

/// Quadrature samples of the solution on its mesh (full-space weights).
struct ExtSamples {
  std::vector<double> a, b, weight, psi;
};

struct ExternalSolution {
  TrapConfig trap;
  ReducedGeometry geometry = ReducedGeometry::cylindrical_trap_z;
  BSplineBasis basis_a, basis_b;
  Eigen::MatrixXd coefficients;  // (basis_a.size(), basis_b.size())
  double E_rel = 0.0;
  double E_0 = 0.0;
  double E_ext = 0.0;
  double boundary_ratio = 0.0;  // max |psi| one interval inside the outer edges / peak
  ExtSamples samples;

  /// psi at reduced coordinates; even in both arguments.
  double psi(double a, double b) const {
    a = std::abs(a);
    b = std::abs(b);
    if (a > basis_a.right() || b > basis_b.right()) return 0.0;
    const int k = basis_a.order();
    double va[16], vb[16], da[16], db[16];
    const int fa = basis_a.evaluate(basis_a.interval_of(a), a, va, da);
    const int fb = basis_b.evaluate(basis_b.interval_of(b), b, vb, db);
    double s = 0.0;
    for (int i = 0; i < k; ++i) {
      double row = 0.0;
      for (int j = 0; j < k; ++j) row += coefficients(fa + i, fb + j) * vb[j];
      s += va[i] * row;
    }
    return s;
  }

  /// Full-space norm by quadrature.
  double norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < samples.psi.size(); ++i) s += samples.weight[i] * samples.psi[i] * samples.psi[i];
    return s;
  }
};

/// E_ext = E_rel - E_0 over the active directions of the trap.
inline double squeezed_energy(double E_rel, const TrapConfig& trap, int N) {
  if (N != 2) throw UnsupportedError("squeezed_energy: only the two-body external problem is solved");
  return E_rel - zero_point_energy(trap.scenario.omega, N);
}

/// Callable psi_ext(a, b) over the reduced coordinates of the transition.
inline std::function<double(double, double)> extract_profile(const ExternalSolution& sol) {
  return [&sol](double a, double b) { return sol.psi(a, b); };
}

namespace detail {

struct Band1D {
  BSplineBasis basis;
  Eigen::MatrixXd M, K, X2;  // dense (size x size) but banded
};

inline Band1D one_dimensional(std::vector<double> breaks, int order, bool radial_weight) {
  Band1D out{BSplineBasis(std::move(breaks), order), {}, {}, {}};
  const int n = out.basis.size();
  out.M = Eigen::MatrixXd::Zero(n, n);
  out.K = Eigen::MatrixXd::Zero(n, n);
  out.X2 = Eigen::MatrixXd::Zero(n, n);
  const auto& br = out.basis.breakpoints();
  std::vector<double> v(order), dv(order);
  for (int e = 0; e + 1 < static_cast<int>(br.size()); ++e) {
    const auto rule = gauss_legendre(order + 2, br[e], br[e + 1]);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double x = rule.nodes[q];
      const double w = rule.weights[q] * (radial_weight ? x : 1.0);
      const int f = out.basis.evaluate(e, x, v.data(), dv.data());
      for (int i = 0; i < order; ++i)
        for (int j = 0; j < order; ++j) {
          out.M(f + i, f + j) += w * v[i] * v[j];
          out.K(f + i, f + j) += w * dv[i] * dv[j];
          out.X2(f + i, f + j) += w * x * x * v[i] * v[j];
        }
    }
  }
  return out;
}

struct ExtMeshPlan {
  double extent_a, extent_b, h_max_a, h_max_b;
};

}  // namespace detail

/**
 * Lowest state of H = -1/2 nabla^2 + 1/2 sum_q omega_q^2 rho_q^2 + V(sqrt2 |rho|) for the
 * relative vector of two unit-mass bosons, discretized by tensor-product B-splines on the
 * reduced coordinates of the transition. `energy_hint` (E_ext estimate, e.g. the d_ini
 * d-solver energy) sets the first box; the box is then adjusted to the computed binding.
 */
inline ExternalSolution solve_relative_ground(const PairPotential& pot, const TrapConfig& trap,
                                              const ExtGridSpec& grid = {},
                                              std::optional<double> energy_hint = std::nullopt) {
  pot.validate();
  trap.scenario.validate();
  const Transition tr = trap.transition();
  const ReducedGeometry geo = geometry_of(tr);
  const double w = trap.omega_ho();
  const bool cyl = geo != ReducedGeometry::planar_trap_y;
  const bool trap_on_a = geo == ReducedGeometry::cylindrical_trap_perp;
  const int k = grid.spline_order;
  if (k < 3 || k > 12) throw DomainError("solve_relative_ground: spline order out of range");
  const bool harmonic = pot.kind == PotentialKind::harmonic;
  const double wpp2 = harmonic ? pot.omega_pp * pot.omega_pp : 0.0;
  const double Oa2 = (trap_on_a ? w * w : 0.0) + wpp2;  // separable curvature per direction
  const double Ob2 = (trap_on_a ? 0.0 : w * w) + wpp2;

  const double b_pot = pot.b_pot;
  double h_core = grid.h_core;
  if (h_core <= 0.0) {
    h_core = harmonic ? 0.2 / std::sqrt(std::sqrt(std::max(Oa2, Ob2))) : 0.15 * b_pot;
    h_core /= grid.refine;
  }
  if (!harmonic && h_core * grid.min_points_per_range > b_pot * 1.000001)
    throw ConfigurationError("solve_relative_ground: mesh does not resolve b_pot");
  const double core = harmonic ? 0.0 : (pot.r0 + 5.0 * b_pot) / std::sqrt(2.0);

  // box for a bound tail exp(-kappa r) in free directions, Gaussian in trapped ones
  auto plan_for = [&](double E_ext) {
    detail::ExtMeshPlan p{};
    auto gauss_extent = [](double O2) { return 7.5 / std::sqrt(std::sqrt(O2)); };
    auto gauss_h = [&](double O2) { return 0.5 / std::sqrt(std::sqrt(O2)) / grid.refine; };
    double free_ext, free_h;
    if (harmonic) {
      free_ext = 0.0;
      free_h = 0.0;
    } else if (E_ext < 0.0) {
      const double kappa = std::sqrt(-2.0 * E_ext);
      free_ext = core + 22.0 / kappa;
      free_h = std::max(h_core, 1.0 / kappa / grid.refine);
    } else {
      free_ext = core + 60.0 * b_pot;
      free_h = 2.0 * b_pot / grid.refine;
    }
    auto direction = [&](double O2_trap, double& ext, double& h) {
      if (harmonic) {
        ext = gauss_extent(O2_trap);
        h = gauss_h(O2_trap);
        return;
      }
      ext = free_ext;
      h = free_h;
      if (O2_trap > 0.0) {
        ext = std::min(free_ext, core + gauss_extent(O2_trap));
        h = std::min(free_h, std::max(h_core, gauss_h(O2_trap)));
      }
    };
    direction(trap_on_a ? w * w + wpp2 : wpp2, p.extent_a, p.h_max_a);
    direction(trap_on_a ? wpp2 : w * w + wpp2, p.extent_b, p.h_max_b);
    if (grid.extent_a > 0.0) p.extent_a = grid.extent_a;
    if (grid.extent_b > 0.0) p.extent_b = grid.extent_b;
    return p;
  };

  double hint = 0.0;
  if (!harmonic) {
    if (energy_hint) {
      hint = *energy_hint;
    } else {
      HyperradialProblem pb;
      pb.N = 2;
      pb.d = tr.d_ini;
      pb.potential = pot;
      const auto s = solve_ground(pb);
      hint = s.bound ? s.energy : 0.0;
    }
  }
  const double E0 = zero_point_energy(trap.scenario.omega, 2);

  auto solve_plan = [&](const detail::ExtMeshPlan& p) {
    auto mesh = [&](double extent, double h_max) {
      return graded_breakpoints(extent, h_core, std::min(core + h_core, extent), 1.15,
                                std::max(h_core, h_max));
    };
    const auto A = detail::one_dimensional(mesh(p.extent_a, p.h_max_a), k, cyl);
    const auto B = detail::one_dimensional(mesh(p.extent_b, p.h_max_b), k, false);
    const int na = A.basis.size() - 1;  // Dirichlet at the outer edges
    const int nb = B.basis.size() - 1;
    auto idx = [nb](int i, int j) { return i * nb + j; };

    std::vector<Eigen::Triplet<double>> th, ts;
    th.reserve(static_cast<std::size_t>(na) * nb * (2 * k - 1) * (2 * k - 1));
    ts.reserve(th.capacity());
    for (int i = 0; i < na; ++i)
      for (int i2 = std::max(0, i - k + 1); i2 < std::min(na, i + k); ++i2) {
        const double Ma = A.M(i, i2), Ka = A.K(i, i2), Xa = A.X2(i, i2);
        for (int j = 0; j < nb; ++j)
          for (int j2 = std::max(0, j - k + 1); j2 < std::min(nb, j + k); ++j2) {
            const double Mb = B.M(j, j2), Kb = B.K(j, j2), Xb = B.X2(j, j2);
            const double h = 0.5 * (Ka * Mb + Ma * Kb) + 0.5 * Oa2 * Xa * Mb + 0.5 * Ob2 * Ma * Xb;
            const double s = Ma * Mb;
            if (h != 0.0) th.emplace_back(idx(i, j), idx(i2, j2), h);
            if (s != 0.0) ts.emplace_back(idx(i, j), idx(i2, j2), s);
          }
      }

    // short-range pair interaction on the elements it reaches
    if (!harmonic && pot.V0 != 0.0) {
      const double reach = pot.cutoff_radius() / std::sqrt(2.0);
      const auto& ba = A.basis.breakpoints();
      const auto& bb = B.basis.breakpoints();
      const int nq = k + 4;
      std::vector<double> va(k), da(k), vb(k), db(k);
      Eigen::MatrixXd loc(k * k, k * k);
      std::vector<double> Vq(nq * nq);
      for (int ea = 0; ea + 1 < static_cast<int>(ba.size()); ++ea) {
        if (ba[ea] >= reach) break;
        const auto ra = gauss_legendre(nq, ba[ea], ba[ea + 1]);
        for (int eb = 0; eb + 1 < static_cast<int>(bb.size()); ++eb) {
          if (ba[ea] * ba[ea] + bb[eb] * bb[eb] >= reach * reach) break;
          const auto rb = gauss_legendre(nq, bb[eb], bb[eb + 1]);
          loc.setZero();
          int fa = 0, fb = 0;
          for (int p = 0; p < nq; ++p) {
            const double x = ra.nodes[p];
            fa = A.basis.evaluate(ea, x, va.data(), da.data());
            for (int q = 0; q < nq; ++q) {
              const double y = rb.nodes[q];
              fb = B.basis.evaluate(eb, y, vb.data(), db.data());
              const double wq = ra.weights[p] * rb.weights[q] * (cyl ? x : 1.0) *
                                evaluate(pot, std::sqrt(2.0 * (x * x + y * y)), 2);
              for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) {
                  const double bij = wq * va[i] * vb[j];
                  for (int i2 = 0; i2 < k; ++i2)
                    for (int j2 = 0; j2 < k; ++j2) loc(i * k + j, i2 * k + j2) += bij * va[i2] * vb[j2];
                }
            }
          }
          for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
              if (fa + i >= na || fb + j >= nb) continue;
              for (int i2 = 0; i2 < k; ++i2)
                for (int j2 = 0; j2 < k; ++j2) {
                  if (fa + i2 >= na || fb + j2 >= nb) continue;
                  th.emplace_back(idx(fa + i, fb + j), idx(fa + i2, fb + j2), loc(i * k + j, i2 * k + j2));
                }
            }
        }
      }
    }
    const int n = na * nb;
    SparseMatrix H(n, n), S(n, n);
    H.setFromTriplets(th.begin(), th.end());
    S.setFromTriplets(ts.begin(), ts.end());
    th.clear();
    th.shrink_to_fit();

    const double lower = (harmonic ? 0.0 : pot.minimum()) - 1.0;
    const auto pair = lowest_eigenpair(H, S, lower);

    ExternalSolution sol;
    sol.trap = trap;
    sol.geometry = geo;
    sol.E_rel = pair.value;
    sol.E_0 = E0;
    sol.E_ext = pair.value - E0;
    const double full = cyl ? 4.0 * M_PI : 4.0;  // mirror images and azimuth
    sol.coefficients = Eigen::MatrixXd::Zero(A.basis.size(), B.basis.size());
    double sum = 0.0;
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < nb; ++j) {
        sol.coefficients(i, j) = pair.vector(idx(i, j));
        sum += pair.vector(idx(i, j));
      }
    sol.coefficients /= std::sqrt(full);
    if (sum < 0.0) sol.coefficients = -sol.coefficients;
    sol.basis_a = A.basis;
    sol.basis_b = B.basis;

    // quadrature samples and boundary diagnostic
    const auto& ba = sol.basis_a.breakpoints();
    const auto& bb = sol.basis_b.breakpoints();
    const int nq = k + 2;
    for (int ea = 0; ea + 1 < static_cast<int>(ba.size()); ++ea) {
      const auto ra = gauss_legendre(nq, ba[ea], ba[ea + 1]);
      for (int eb = 0; eb + 1 < static_cast<int>(bb.size()); ++eb) {
        const auto rb = gauss_legendre(nq, bb[eb], bb[eb + 1]);
        for (int p = 0; p < nq; ++p)
          for (int q = 0; q < nq; ++q) {
            const double x = ra.nodes[p], y = rb.nodes[q];
            sol.samples.a.push_back(x);
            sol.samples.b.push_back(y);
            sol.samples.weight.push_back(full * ra.weights[p] * rb.weights[q] * (cyl ? x : 1.0));
            sol.samples.psi.push_back(sol.psi(x, y));
          }
      }
    }
    double peak = 0.0;
    for (double v : sol.samples.psi) peak = std::max(peak, std::abs(v));
    double edge = 0.0;
    const double xa = ba[ba.size() - 2], xb = bb[bb.size() - 2];
    for (std::size_t e = 0; e + 1 < bb.size(); ++e) edge = std::max(edge, std::abs(sol.psi(xa, bb[e])));
    for (std::size_t e = 0; e + 1 < ba.size(); ++e) edge = std::max(edge, std::abs(sol.psi(ba[e], xb)));
    sol.boundary_ratio = peak > 0.0 ? edge / peak : 1.0;
    return sol;
  };

  auto plan = plan_for(hint);
  ExternalSolution sol = solve_plan(plan);
  const bool user_box = grid.extent_a > 0.0 || grid.extent_b > 0.0;
  for (int iter = 0; iter < 4 && !harmonic && !user_box && sol.E_ext < 0.0; ++iter) {
    const auto need = plan_for(sol.E_ext);
    const bool grow = need.extent_a > plan.extent_a * 1.0001 || need.extent_b > plan.extent_b * 1.0001;
    const bool coarse = plan.h_max_a > 1.3 * need.h_max_a || plan.h_max_b > 1.3 * need.h_max_b;
    if (!grow && !coarse) break;
    plan.extent_a = std::max(plan.extent_a, need.extent_a);
    plan.extent_b = std::max(plan.extent_b, need.extent_b);
    plan.h_max_a = std::min(plan.h_max_a, need.h_max_a);
    plan.h_max_b = std::min(plan.h_max_b, need.h_max_b);
    sol = solve_plan(plan);
  }
  const bool bound = harmonic || sol.E_ext < 0.0;
  if (bound && sol.boundary_ratio > 1e-6) {
    std::ostringstream os;
    os << "solve_relative_ground: box too small, |psi| near the boundary is " << sol.boundary_ratio
       << " of the peak";
    throw AccuracyError(os.str());
  }
  return sol;
}

}  // namespace dsq
