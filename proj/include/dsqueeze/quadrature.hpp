#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "dsqueeze/errors.hpp"

namespace dsq {

/// Nodes and weights of a one-dimensional quadrature rule.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/**
 * Gauss-Jacobi rule for
 *   \int_{-1}^{1} (1-x)^alpha (1+x)^beta f(x) dx
 * built with the Golub-Welsch algorithm. Exact for polynomials of degree 2n-1.
 */
inline QuadratureRule gauss_jacobi(int n, double alpha, double beta) {
  if (n < 1) throw DomainError("gauss_jacobi: need at least one node");
  if (!(alpha > -1.0) || !(beta > -1.0))
    throw DomainError("gauss_jacobi: exponents must exceed -1");

  const double ab = alpha + beta;
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(n > 1 ? n - 1 : 1);
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + ab;
    if (k == 0) {
      diag(k) = (beta - alpha) / (ab + 2.0);
    } else {
      diag(k) = (beta * beta - alpha * alpha) / (s * (s + 2.0));
    }
  }
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + ab;
    double b2;
    if (k == 1) {
      // the generic formula is 0/0 when alpha + beta = -1
      b2 = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((ab + 2.0) * (ab + 2.0) * (ab + 3.0));
    } else {
      b2 = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
    }
    sub(k - 1) = std::sqrt(b2);
  }

  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                              std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0));

  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  if (n == 1) {
    rule.nodes[0] = diag(0);
    rule.weights[0] = mu0;
    return rule;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw NumericError("gauss_jacobi: eigensolver failed");
  for (int k = 0; k < n; ++k) {
    rule.nodes[k] = solver.eigenvalues()(k);
    const double v0 = solver.eigenvectors()(0, k);
    rule.weights[k] = mu0 * v0 * v0;
  }
  return rule;
}

inline QuadratureRule gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

/// Gauss-Legendre rule mapped to [a, b].
inline QuadratureRule gauss_legendre(int n, double a, double b) {
  QuadratureRule rule = gauss_legendre(n);
  const double half = 0.5 * (b - a);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    rule.nodes[i] = a + half * (rule.nodes[i] + 1.0);
    rule.weights[i] *= half;
  }
  return rule;
}

/**
 * Rule for \int_0^h x^p f(x) dx with the endpoint power absorbed into the weights.
 * p > -1 need not be an integer.
 */
inline QuadratureRule gauss_power_weight(int n, double p, double h) {
  QuadratureRule rule = gauss_jacobi(n, 0.0, p);
  const double scale = std::pow(0.5 * h, p + 1.0);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    rule.nodes[i] = 0.5 * h * (rule.nodes[i] + 1.0);
    rule.weights[i] *= scale;
  }
  return rule;
}

/// Jacobi polynomials P_0..P_nmax at x (unnormalized, standard convention P_n(1) = binom(n+alpha, n)).
inline void jacobi_polynomials(int nmax, double alpha, double beta, double x, double* out) {
  out[0] = 1.0;
  if (nmax == 0) return;
  out[1] = (alpha + 1.0) + 0.5 * (alpha + beta + 2.0) * (x - 1.0);
  const double ab = alpha + beta;
  for (int n = 2; n <= nmax; ++n) {
    const double s = 2.0 * n + ab;
    const double a1 = 2.0 * n * (n + ab) * (s - 2.0);
    const double a2 = (s - 1.0) * (s * (s - 2.0) * x + alpha * alpha - beta * beta);
    const double a3 = 2.0 * (n + alpha - 1.0) * (n + beta - 1.0) * s;
    out[n] = (a2 * out[n - 1] - a3 * out[n - 2]) / a1;
  }
}

}  // namespace dsq
