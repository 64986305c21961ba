#pragma once

#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "dsqueeze/errors.hpp"
#include "dsqueeze/potentials.hpp"
#include "dsqueeze/quadrature.hpp"

namespace dsq {

/**
 * s-wave hyperspherical harmonics for three identical bosons in d dimensions.
 *
 * With Jacobi vectors x = rho sin(alpha), y = rho cos(alpha) (pair 12 in x), the hyperangular
 * volume for functions of alpha alone is (sin alpha cos alpha)^{d-1} d alpha, i.e.
 * (1 - t^2)^{(d-2)/2} dt with t = cos(2 alpha). Y_K, K = 2n, is the degree-n polynomial in t
 * orthonormal under that weight (normalized measure), obtained by Gram-Schmidt of Jacobi
 * polynomials against a Gauss-Jacobi rule.
 *
 * Matrix elements of V12 + V23 + V31 are reduced to pair-12 integrals by rotating Y_K into
 * the other Jacobi sets: cos(2 alpha') = -t/2 + (sqrt3/2) sqrt(1-t^2) u, u = cos(angle between
 * x and y), averaged with the normalized weight (1-u^2)^{(d-3)/2} (two points u = +-1 at d = 1).
 * The combination Y_K Y_K' + 2 <Y_K Y_K'>_rotated is a polynomial in t of degree <= n + n'
 * and is stored by its expansion coefficients in the orthonormal Y_j, so that
 *   W_KK'(rho) = sum_j c_KK'j M_j(rho),  M_j(rho) = <V(r_12) Y_j>.
 */
class ChannelBasis {
 public:
  ChannelBasis(double d, int K_max, int quadrature_order = 0) : d_(d), K_max_(K_max) {
    if (!(d >= 1.0 && d <= 3.0))
      throw DomainError("ChannelBasis: three-body channels need d in [1, 3]");
    if (K_max < 0 || K_max % 2 != 0) throw DomainError("ChannelBasis: K_max must be even and >= 0");
    lambda_ = 0.5 * (d - 2.0);
    n_channels_ = K_max / 2 + 1;
    n_poly_ = K_max + 1;  // products need degree up to K_max
    const int order = quadrature_order > 0 ? quadrature_order : 2 * n_poly_ + 8;
    build_polynomials(order);
    build_coupling(order);
  }

  double dimension() const { return d_; }
  int K_max() const { return K_max_; }
  int channels() const { return n_channels_; }
  int K(int c) const { return 2 * c; }
  double lambda() const { return lambda_; }

  /// Orthonormal Y_j (degree j in t = cos 2alpha) at t, j = 0..K_max.
  void evaluate(double t, double* out) const {
    std::vector<double> p(n_poly_);
    jacobi_polynomials(n_poly_ - 1, lambda_, lambda_, t, p.data());
    for (int j = 0; j < n_poly_; ++j) {
      double s = 0.0;
      for (int m = 0; m <= j; ++m) s += R_(j, m) * p[m];
      out[j] = s;
    }
  }

  /// Channel function Y_K at hyperangle alpha.
  double channel_function(int c, double alpha) const {
    std::vector<double> y(n_poly_);
    evaluate(std::cos(2.0 * alpha), y.data());
    return y[c];
  }

  /// Gram matrix of the channel functions under the normalized hyperangular measure.
  Eigen::MatrixXd gram(int order) const {
    const auto rule = gauss_jacobi(order, lambda_, lambda_);
    const double z = measure_norm();
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n_channels_, n_channels_);
    std::vector<double> y(n_poly_);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      evaluate(rule.nodes[i], y.data());
      for (int a = 0; a < n_channels_; ++a)
        for (int b = 0; b < n_channels_; ++b) G(a, b) += rule.weights[i] * y[a] * y[b] / z;
    }
    return G;
  }

  /// Hyperangular eigenvalue K(K + 2d - 2) of channel c.
  double hyperangular_eigenvalue(int c) const {
    const double K = 2.0 * c;
    return K * (K + 2.0 * d_ - 2.0);
  }

  /// Coupling coefficient c_{ab j}.
  double coupling_coefficient(int a, int b, int j) const { return C_[a * n_channels_ + b](j); }

  /// Potential moments M_j(rho) = <V(r_12) Y_j> with r_12 = rho sqrt(1 - t).
  Eigen::VectorXd moments(const PairPotential& p, double rho) const;

  /// W_KK'(rho) = <Y_K | V12 + V23 + V31 | Y_K'>.
  Eigen::MatrixXd coupling_matrix(const PairPotential& p, double rho) const {
    return coupling_from_moments(moments(p, rho));
  }

  Eigen::MatrixXd coupling_from_moments(const Eigen::VectorXd& m) const {
    Eigen::MatrixXd W(n_channels_, n_channels_);
    for (int a = 0; a < n_channels_; ++a)
      for (int b = a; b < n_channels_; ++b) {
        const double v = C_[a * n_channels_ + b].dot(m);
        W(a, b) = v;
        W(b, a) = v;
      }
    return W;
  }

  /// int_{-1}^{1} (1 - t^2)^lambda dt
  double measure_norm() const {
    return std::exp((2.0 * lambda_ + 1.0) * std::log(2.0) + 2.0 * std::lgamma(lambda_ + 1.0) -
                    std::lgamma(2.0 * lambda_ + 2.0));
  }

 private:
  void build_polynomials(int order) {
    const auto rule = gauss_jacobi(order, lambda_, lambda_);
    const double z = measure_norm();
    const int np = n_poly_;
    Eigen::MatrixXd P(rule.size(), np);  // raw Jacobi values at nodes
    std::vector<double> p(np);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      jacobi_polynomials(np - 1, lambda_, lambda_, rule.nodes[i], p.data());
      for (int j = 0; j < np; ++j) P(i, j) = p[j];
    }
    Eigen::VectorXd w(rule.size());
    for (std::size_t i = 0; i < rule.size(); ++i) w(i) = rule.weights[i] / z;

    // modified Gram-Schmidt; R_ maps raw polynomials to orthonormal ones
    R_ = Eigen::MatrixXd::Zero(np, np);
    Eigen::MatrixXd Q(rule.size(), np);
    for (int j = 0; j < np; ++j) {
      Eigen::VectorXd v = P.col(j);
      Eigen::VectorXd coef = Eigen::VectorXd::Zero(np);
      coef(j) = 1.0;
      for (int pass = 0; pass < 2; ++pass)
        for (int m = 0; m < j; ++m) {
          const double proj = (Q.col(m).array() * v.array() * w.array()).sum();
          v -= proj * Q.col(m);
          coef -= proj * R_.row(m).transpose();
        }
      const double nrm = std::sqrt((v.array() * v.array() * w.array()).sum());
      if (!(nrm > 1e-300)) throw ConfigurationError("ChannelBasis: degenerate polynomial basis");
      Q.col(j) = v / nrm;
      R_.row(j) = (coef / nrm).transpose();
    }
  }

  void build_coupling(int order) {
    const auto trule = gauss_jacobi(order, lambda_, lambda_);
    const double z = measure_norm();
    QuadratureRule urule;
    if (d_ == 1.0) {
      urule.nodes = {-1.0, 1.0};
      urule.weights = {0.5, 0.5};
    } else {
      urule = gauss_jacobi(n_poly_ + 2, 0.5 * (d_ - 3.0), 0.5 * (d_ - 3.0));
      double s = 0.0;
      for (double w : urule.weights) s += w;
      for (double& w : urule.weights) w /= s;
    }
    const int nc = n_channels_;
    C_.assign(nc * nc, Eigen::VectorXd::Zero(n_poly_));
    std::vector<double> y(n_poly_), yr(n_poly_);
    const double c3 = 0.5 * std::sqrt(3.0);
    for (std::size_t i = 0; i < trule.size(); ++i) {
      const double t = trule.nodes[i];
      const double wt = trule.weights[i] / z;
      evaluate(t, y.data());
      Eigen::MatrixXd F(nc, nc);
      for (int a = 0; a < nc; ++a)
        for (int b = 0; b < nc; ++b) F(a, b) = y[a] * y[b];
      const double st = std::sqrt(std::max(0.0, 1.0 - t * t));
      for (std::size_t k = 0; k < urule.size(); ++k) {
        const double tr = -0.5 * t + c3 * st * urule.nodes[k];
        evaluate(tr, yr.data());
        for (int a = 0; a < nc; ++a)
          for (int b = 0; b < nc; ++b) F(a, b) += 2.0 * urule.weights[k] * yr[a] * yr[b];
      }
      for (int a = 0; a < nc; ++a)
        for (int b = 0; b < nc; ++b)
          for (int j = 0; j < n_poly_; ++j) C_[a * nc + b](j) += wt * F(a, b) * y[j];
    }
    // degree bound: exact zeros beyond n + n'
    for (int a = 0; a < nc; ++a)
      for (int b = 0; b < nc; ++b)
        for (int j = a + b + 1; j < n_poly_; ++j) C_[a * nc + b](j) = 0.0;
  }

  double d_;
  int K_max_;
  double lambda_;
  int n_channels_;
  int n_poly_;
  Eigen::MatrixXd R_;
  std::vector<Eigen::VectorXd> C_;
};

inline Eigen::VectorXd ChannelBasis::moments(const PairPotential& p, double rho) const {
  if (!(rho > 0.0)) throw DomainError("ChannelBasis::moments: rho must be positive");
  const int np = n_poly_;
  Eigen::VectorXd M = Eigen::VectorXd::Zero(np);
  const double z = measure_norm();
  const double lam = lambda_;
  std::vector<double> y(np);
  const double r_cut = p.cutoff_radius();
  const int pts = 20;

  // panel A: t in [0, 1] in the pair distance r = rho sqrt(1 - t) in [0, rho]
  //   (2 / rho^{2 lam + 2}) int_0^rho r^{d-1} (2 - r^2/rho^2)^lam V(r) Y_j(1 - r^2/rho^2) dr
  const double r_end = std::min(rho, r_cut);
  const double pref = 2.0 / (z * std::pow(rho, 2.0 * lam + 2.0));
  auto add_point = [&](double r, double w) {
    const double s = r * r / (rho * rho);
    const double f = std::pow(2.0 - s, lam) * dsq::evaluate(p, r, 3);
    evaluate(1.0 - s, y.data());
    for (int j = 0; j < np; ++j) M(j) += pref * w * f * y[j];
  };
  const double h = p.short_range() ? p.b_pot : std::max(r_end, 1e-300);
  const double first = std::min(h, r_end);
  {
    const auto rule = gauss_power_weight(pts, d_ - 1.0, first);
    for (std::size_t i = 0; i < rule.size(); ++i) add_point(rule.nodes[i], rule.weights[i]);
  }
  for (double a = first; a < r_end; a += h) {
    const double b = std::min(a + h, r_end);
    if (b - a <= 0.0) break;
    const auto rule = gauss_legendre(pts, a, b);
    for (std::size_t i = 0; i < rule.size(); ++i)
      add_point(rule.nodes[i], rule.weights[i] * std::pow(rule.nodes[i], d_ - 1.0));
  }

  // panel B: t in [-1, 0], r in [rho, sqrt2 rho]; only reached by the interaction at small rho
  if (rho < r_cut) {
    auto rule = gauss_jacobi(pts, 0.0, lam);  // weight (1 + tau)^lam on tau in [-1, 1]
    const double scale = std::pow(0.5, lam) * 0.5;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double t = 0.5 * (rule.nodes[i] - 1.0);
      const double w = rule.weights[i] * scale / z;
      const double f = std::pow(1.0 - t, lam) * dsq::evaluate(p, rho * std::sqrt(1.0 - t), 3);
      evaluate(t, y.data());
      for (int j = 0; j < np; ++j) M(j) += w * f * y[j];
    }
  }
  return M;
}

/// Three-body s-wave channel basis; throws ConfigurationError if the quadrature fails to
/// reproduce an identity Gram matrix to 1e-10.
inline ChannelBasis build_channel_basis(int N, double d, int K_max, int quadrature_order = 0) {
  if (N != 3) throw UnsupportedError("build_channel_basis: channels are only built for N = 3");
  ChannelBasis b(d, K_max, quadrature_order);
  const Eigen::MatrixXd G = b.gram(2 * K_max + 16);
  const double err = (G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff();
  if (err > 1e-10) {
    std::ostringstream os;
    os << "build_channel_basis: Gram matrix deviates from identity by " << err
       << "; raise the quadrature order";
    throw ConfigurationError(os.str());
  }
  return b;
}

/// W_KK'(rho) = <Y_K | V12 + V23 + V31 | Y_K'>.
inline Eigen::MatrixXd potential_coupling_matrix(const ChannelBasis& basis, const PairPotential& p,
                                                 double rho) {
  return basis.coupling_matrix(p, rho);
}

}  // namespace dsq
