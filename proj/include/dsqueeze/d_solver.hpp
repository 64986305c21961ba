#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "dsqueeze/bspline.hpp"
#include "dsqueeze/channel_basis.hpp"
#include "dsqueeze/errors.hpp"
#include "dsqueeze/lowest_eigen.hpp"
#include "dsqueeze/oscillator.hpp"
#include "dsqueeze/potentials.hpp"
#include "dsqueeze/quadrature.hpp"

namespace dsq {

/// Radial mesh request. Zero fields are chosen automatically from the problem scales.
struct GridSpec {
  double rho_max = 0.0;
  int intervals = 0;
  Spacing spacing = Spacing::graded;
  double refine = 1.0;  // divides every automatic spacing

  bool operator==(const GridSpec& o) const {
    return rho_max == o.rho_max && intervals == o.intervals && spacing == o.spacing &&
           refine == o.refine;
  }
};

struct HyperradialProblem {
  int N = 2;
  double d = 3.0;
  PairPotential potential;
  int K_max = 0;  // three-body channel cutoff (even)
  GridSpec grid;
  int spline_order = 8;
  bool check_channel_convergence = false;
  double channel_tolerance = 1e-6;

  double l() const { return generalized_angular_momentum(N, d); }

  void validate() const {
    if (N != 2 && N != 3) throw UnsupportedError("HyperradialProblem: only N = 2 and N = 3 are solved");
    if (!(d > 0.0 && d <= 3.0)) throw DomainError("HyperradialProblem: d must lie in (0, 3]");
    if (!(l() + 1.5 > 0.0)) throw DomainError("HyperradialProblem: l + 3/2 must be positive");
    if (N == 3 && d < 1.0) throw DomainError("HyperradialProblem: three-body channels need d >= 1");
    if (N == 3 && (K_max < 0 || K_max % 2 != 0)) throw DomainError("HyperradialProblem: K_max must be even");
    if (spline_order < 3 || spline_order > 15) throw DomainError("HyperradialProblem: spline order out of range");
    potential.validate();
  }
};

/**
 * Ground state of the hyperradial problem. Channel functions are stored through the smooth
 * factor g_K = F_K / rho^{l+1} expanded in B-splines; F_K(rho) = rho^{l+1} g_K(rho) and
 * sum_K int F_K^2 drho = 1.
 */
class HyperradialSolution {
 public:
  double energy = 0.0;
  bool bound = true;
  int n_r = 0;
  double rho_max = 0.0;
  std::vector<int> K_list;
  std::vector<double> channel_weights;
  std::vector<std::string> warnings;

  int N = 2;
  double d = 3.0;
  double l = 0.0;
  BSplineBasis basis;
  std::vector<Eigen::VectorXd> coefficients;  // per channel, over the full B-spline basis

  double g(int channel, double rho) const { return basis.expand(coefficients[channel], rho); }

  /// Radial channel function F_d^(K)(rho).
  double F(int channel, double rho) const {
    if (rho <= 0.0) return (l + 1.0 == 0.0) ? g(channel, 0.0) : 0.0;
    return std::pow(rho, l + 1.0) * g(channel, rho);
  }

  /// Channel functions sampled on `rho`.
  std::vector<std::vector<double>> sample(const std::vector<double>& rho) const {
    std::vector<std::vector<double>> out(coefficients.size(), std::vector<double>(rho.size()));
    for (std::size_t c = 0; c < coefficients.size(); ++c)
      for (std::size_t i = 0; i < rho.size(); ++i) out[c][i] = F(static_cast<int>(c), rho[i]);
    return out;
  }

  /// sum_K int rho^p F_K^2 drho by Gauss quadrature on the solution mesh.
  double moment(double p) const { return radial_integral(p, -1); }

  /// int_0^inf rho^{q} g_0(rho)^2 drho (used to renormalize the 3D reinterpretation).
  double g0_power_integral(double q) const {
    return integrate([&](double rho) {
      const double v = g(0, rho);
      return v * v;
    }, q);
  }

 private:
  double radial_integral(double p, int only_channel) const {
    double total = 0.0;
    for (std::size_t c = 0; c < coefficients.size(); ++c) {
      if (only_channel >= 0 && static_cast<int>(c) != only_channel) continue;
      total += integrate([&](double rho) {
        const double v = g(static_cast<int>(c), rho);
        return v * v;
      }, 2.0 * l + 2.0 + p);
    }
    return total;
  }

  // int_0^rho_max rho^power f(rho) drho
  template <class Fn>
  double integrate(Fn&& f, double power) const {
    const auto& br = basis.breakpoints();
    const int nq = basis.order() + 6;
    double s = 0.0;
    for (std::size_t e = 0; e + 1 < br.size(); ++e) {
      if (e == 0) {
        const auto rule = gauss_power_weight(nq, power, br[1]);
        for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * f(rule.nodes[i]);
      } else {
        const auto rule = gauss_legendre(nq, br[e], br[e + 1]);
        for (std::size_t i = 0; i < rule.size(); ++i)
          s += rule.weights[i] * std::pow(rule.nodes[i], power) * f(rule.nodes[i]);
      }
    }
    return s;
  }
};

struct RmsObservables {
  double rho_rms = 0.0;
  double per_particle_rms = 0.0;  // sqrt(<sum_i (r_i - R)^2> / N)
  double radius = 0.0;            // rho_rms for N = 2, rho_rms / sqrt3 for N = 3
};

inline RmsObservables rms_observables(const HyperradialSolution& sol) {
  RmsObservables r;
  const double norm = sol.moment(0.0);
  r.rho_rms = std::sqrt(sol.moment(2.0) / norm);
  r.per_particle_rms = r.rho_rms / std::sqrt(static_cast<double>(sol.N));
  r.radius = sol.N == 2 ? r.rho_rms : r.rho_rms / std::sqrt(3.0);
  return r;
}

namespace detail {

struct RadialMesh {
  std::vector<double> breaks;
  double h_max = 0.0;
};

inline double core_extent(const HyperradialProblem& pb) {
  const auto& p = pb.potential;
  if (p.kind == PotentialKind::harmonic) return 9.0 / std::sqrt(p.omega_pp);
  return p.r0 + 5.0 * p.b_pot;
}

inline std::vector<double> make_breaks(const HyperradialProblem& pb, double rho_max, double h_max) {
  const auto& g = pb.grid;
  const auto& p = pb.potential;
  const double core_len = p.kind == PotentialKind::harmonic ? 1.0 / std::sqrt(p.omega_pp) : p.b_pot;
  const double h_core = 0.12 * core_len / g.refine;
  const double core = core_extent(pb);
  switch (g.spacing) {
    case Spacing::uniform:
    case Spacing::quadratic: {
      int n = g.intervals;
      if (n <= 0) n = static_cast<int>(std::ceil(rho_max / (2.0 * h_core)));
      return g.spacing == Spacing::uniform ? uniform_breakpoints(rho_max, n)
                                           : quadratic_breakpoints(rho_max, n);
    }
    case Spacing::graded:
      return graded_breakpoints(rho_max, h_core, std::min(core, rho_max), 1.08,
                                std::max(h_core, h_max / g.refine));
  }
  return {};
}

struct Assembled {
  SparseMatrix H;
  SparseMatrix S;
  std::vector<std::pair<int, int>> unknowns;  // (spline index, channel)
  double lower_bound = 0.0;
};

inline Assembled assemble(const HyperradialProblem& pb, const BSplineBasis& basis,
                          const ChannelBasis* channels) {
  const int C = channels ? channels->channels() : 1;
  const int nb = basis.size();
  const int k = basis.order();
  const double D = (pb.N - 1) * pb.d;  // radial weight rho^{D-1}
  // unknown numbering interleaves channels; K > 0 channels vanish at the origin and every
  // channel vanishes at rho_max
  std::vector<int> index(nb * C, -1);
  Assembled out;
  for (int i = 0; i + 1 < nb; ++i)
    for (int c = 0; c < C; ++c) {
      if (i == 0 && c > 0) continue;
      index[i * C + c] = static_cast<int>(out.unknowns.size());
      out.unknowns.emplace_back(i, c);
    }
  const int n = static_cast<int>(out.unknowns.size());

  std::vector<double> kappa(C);
  for (int c = 0; c < C; ++c) {
    const double K = 2.0 * c;
    kappa[c] = K * (K + D - 2.0);
  }

  std::vector<Eigen::Triplet<double>> th, ts;
  const auto& br = basis.breakpoints();
  const int nq = k + 4;
  double vmin = 0.0;
  bool first_point = true;
  std::vector<double> v(k), dv(k);
  Eigen::MatrixXd W(C, C);
  for (int e = 0; e + 1 < static_cast<int>(br.size()); ++e) {
    const QuadratureRule rule = e == 0 ? gauss_power_weight(nq, D - 1.0, br[1])
                                       : gauss_legendre(nq, br[e], br[e + 1]);
    Eigen::MatrixXd He = Eigen::MatrixXd::Zero(k * C, k * C);
    Eigen::MatrixXd Se = Eigen::MatrixXd::Zero(k, k);
    int first = 0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double rho = rule.nodes[q];
      const double w = e == 0 ? rule.weights[q] : rule.weights[q] * std::pow(rho, D - 1.0);
      first = basis.evaluate(e, rho, v.data(), dv.data());
      if (channels) {
        W = channels->coupling_matrix(pb.potential, rho);
      } else {
        W(0, 0) = evaluate(pb.potential, std::sqrt(2.0) * rho, 2);
      }
      const double wmin = C == 1 ? W(0, 0) : Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(W, Eigen::EigenvaluesOnly).eigenvalues()(0);
      if (first_point || wmin < vmin) vmin = wmin;
      first_point = false;
      const double inv_r2 = 1.0 / (rho * rho);
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
          const double bb = v[a] * v[b];
          Se(a, b) += w * bb;
          const double kin = 0.5 * dv[a] * dv[b];
          for (int c = 0; c < C; ++c) {
            He(a * C + c, b * C + c) += w * (kin + 0.5 * kappa[c] * inv_r2 * bb);
            for (int c2 = 0; c2 < C; ++c2) He(a * C + c, b * C + c2) += w * W(c, c2) * bb;
          }
        }
    }
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        for (int c = 0; c < C; ++c) {
          const int ia = index[(first + a) * C + c];
          const int ib = index[(first + b) * C + c];
          if (ia >= 0 && ib >= 0 && Se(a, b) != 0.0) ts.emplace_back(ia, ib, Se(a, b));
          for (int c2 = 0; c2 < C; ++c2) {
            const int jb = index[(first + b) * C + c2];
            if (ia >= 0 && jb >= 0) th.emplace_back(ia, jb, He(a * C + c, b * C + c2));
          }
        }
  }
  out.H.resize(n, n);
  out.S.resize(n, n);
  out.H.setFromTriplets(th.begin(), th.end());
  out.S.setFromTriplets(ts.begin(), ts.end());
  out.lower_bound = vmin - 1.0;
  return out;
}

inline HyperradialSolution solve_on_mesh(const HyperradialProblem& pb, std::vector<double> breaks,
                                         const ChannelBasis* channels) {
  BSplineBasis basis(std::move(breaks), pb.spline_order);
  auto sys = assemble(pb, basis, channels);
  const auto pair = lowest_eigenpair(sys.H, sys.S, sys.lower_bound);

  HyperradialSolution sol;
  sol.N = pb.N;
  sol.d = pb.d;
  sol.l = pb.l();
  sol.energy = pair.value;
  sol.rho_max = basis.right();
  const int C = channels ? channels->channels() : 1;
  sol.coefficients.assign(C, Eigen::VectorXd::Zero(basis.size()));
  for (std::size_t u = 0; u < sys.unknowns.size(); ++u) {
    const auto [i, c] = sys.unknowns[u];
    sol.coefficients[c](i) = pair.vector(static_cast<Eigen::Index>(u));
  }
  for (int c = 0; c < C; ++c) sol.K_list.push_back(2 * c);
  sol.basis = std::move(basis);

  // sign convention: g_0 positive at its largest magnitude
  {
    double best = 0.0;
    for (int i = 0; i < sol.coefficients[0].size(); ++i)
      if (std::abs(sol.coefficients[0](i)) > std::abs(best)) best = sol.coefficients[0](i);
    if (best < 0.0)
      for (auto& cv : sol.coefficients) cv = -cv;
  }
  double total = 0.0;
  sol.channel_weights.resize(C);
  for (int c = 0; c < C; ++c) {
    // S is block diagonal in channels, so channel weights follow from the channel blocks
    double wsum = 0.0;
    for (std::size_t u = 0; u < sys.unknowns.size(); ++u) {
      if (sys.unknowns[u].second != c) continue;
      for (SparseMatrix::InnerIterator it(sys.S, static_cast<Eigen::Index>(u)); it; ++it)
        wsum += pair.vector(static_cast<Eigen::Index>(u)) * it.value() * pair.vector(it.row());
    }
    sol.channel_weights[c] = wsum;
    total += wsum;
  }
  for (double& w : sol.channel_weights) w /= total;

  // radial nodes of the dominant channel
  int dom = 0;
  for (int c = 1; c < C; ++c)
    if (sol.channel_weights[c] > sol.channel_weights[dom]) dom = c;
  double gmax = 0.0;
  std::vector<double> samples;
  const auto& br = sol.basis.breakpoints();
  for (std::size_t e = 0; e + 1 < br.size(); ++e)
    for (int s = 0; s < 4; ++s) {
      const double rho = br[e] + (br[e + 1] - br[e]) * (s + 0.5) / 4.0;
      samples.push_back(sol.g(dom, rho));
      gmax = std::max(gmax, std::abs(samples.back()));
    }
  int nodes = 0;
  double last = 0.0;
  for (double x : samples) {
    if (std::abs(x) < 1e-6 * gmax) continue;
    if (last != 0.0 && (x > 0.0) != (last > 0.0)) ++nodes;
    last = x;
  }
  sol.n_r = nodes;
  return sol;
}

}  // namespace detail

/**
 * Lowest solution of the (coupled) hyperradial equations
 *   [-1/2 d^2/drho^2 + (l(l+1) + K(K + (N-1)d - 2)) / (2 rho^2) - E] F_K + sum_K' W_KK' F_K' = 0
 * (hbar = m = 1) by B-spline Galerkin on g_K = F_K / rho^{l+1} with weight rho^{(N-1)d - 1}.
 * The box is enlarged until the bound-state tail has decayed by ~1e-10; a ground state that
 * stays at E >= 0 in boxes up to 1e4 b_pot is reported as unbound.
 */
inline HyperradialSolution solve_ground(const HyperradialProblem& pb) {
  pb.validate();
  std::unique_ptr<ChannelBasis> channels;
  if (pb.N == 3) channels = std::make_unique<ChannelBasis>(pb.d, pb.K_max);

  const auto& p = pb.potential;
  const double core = detail::core_extent(pb);
  double rho_max = pb.grid.rho_max > 0.0 ? pb.grid.rho_max
                   : p.kind == PotentialKind::harmonic ? core
                                                       : core + 35.0 * p.b_pot;
  double h_max = p.kind == PotentialKind::harmonic ? 0.12 / std::sqrt(p.omega_pp) : 1.0 * p.b_pot;
  const bool auto_box = pb.grid.rho_max <= 0.0 && p.short_range();
  const double box_cap = 1e4 * p.b_pot;

  HyperradialSolution sol;
  for (int iter = 0; iter < 12; ++iter) {
    sol = detail::solve_on_mesh(pb, detail::make_breaks(pb, rho_max, h_max), channels.get());
    if (!auto_box) break;
    if (sol.energy < 0.0) {
      const double kappa = std::sqrt(2.0 * -sol.energy);
      const double need = core + 24.0 / kappa;
      const double h_need = std::min(1.0 * p.b_pot + 0.5 / kappa, 0.6 / kappa + p.b_pot);
      if (need <= rho_max * 1.0001 && h_max <= h_need * 1.0001) break;
      rho_max = std::max(rho_max, 1.1 * need);
      h_max = std::min(std::max(h_max, h_need), h_need);
    } else {
      if (rho_max >= box_cap) {
        sol.bound = false;
        break;
      }
      rho_max = std::min(box_cap, rho_max * 5.0);
      h_max = std::max(h_max, rho_max / 40.0);
    }
  }
  if (p.short_range() && sol.energy >= 0.0) sol.bound = false;

  if (pb.check_channel_convergence && pb.N == 3 && pb.K_max >= 2) {
    HyperradialProblem lower = pb;
    lower.K_max = pb.K_max - 2;
    lower.check_channel_convergence = false;
    lower.grid.rho_max = sol.rho_max;
    const auto coarse = solve_ground(lower);
    const double shift = std::abs(coarse.energy - sol.energy);
    if (shift > pb.channel_tolerance * std::max(1.0, std::abs(sol.energy))) {
      std::ostringstream os;
      os.precision(10);
      os << "channel expansion not converged: E(K_max=" << lower.K_max << ") = " << coarse.energy
         << ", E(K_max=" << pb.K_max << ") = " << sol.energy;
      sol.warnings.push_back(os.str());
    }
  }
  return sol;
}

}  // namespace dsq
