#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "dsqueeze/errors.hpp"

namespace dsq {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct Eigenpair {
  double value = 0.0;
  Eigen::VectorXd vector;  // S-normalized
  double next_value = 0.0;  // Ritz estimate of the second eigenvalue (upper bound)
  int iterations = 0;
};

namespace detail {

struct LanczosResult {
  double theta0 = 0.0;
  double theta1 = 0.0;
  Eigen::VectorXd ritz;
  double residual = 0.0;
  int steps = 0;
};

// Lanczos on (H - sigma S)^{-1} S in the S inner product; returns the largest Ritz pair.
template <class Factor>
LanczosResult shift_invert_lanczos(const Factor& factor, const SparseMatrix& S,
                                   const Eigen::VectorXd& start, int max_steps, double tol) {
  const Eigen::Index n = S.rows();
  max_steps = static_cast<int>(std::min<Eigen::Index>(max_steps, n));
  Eigen::MatrixXd V(n, max_steps + 1);
  Eigen::MatrixXd SV(n, max_steps + 1);
  std::vector<double> alpha, beta;

  Eigen::VectorXd v = start;
  Eigen::VectorXd sv = S * v;
  double nrm = std::sqrt(v.dot(sv));
  V.col(0) = v / nrm;
  SV.col(0) = sv / nrm;

  LanczosResult out;
  for (int j = 0; j < max_steps; ++j) {
    Eigen::VectorXd w = factor.solve(SV.col(j));
    const double a = w.dot(SV.col(j));
    alpha.push_back(a);
    // full reorthogonalization in the S inner product, applied twice
    for (int pass = 0; pass < 2; ++pass) {
      Eigen::VectorXd coef = SV.leftCols(j + 1).transpose() * w;
      w.noalias() -= V.leftCols(j + 1) * coef;
    }
    Eigen::VectorXd sw = S * w;
    const double b = std::sqrt(std::max(0.0, w.dot(sw)));

    const int m = j + 1;
    Eigen::VectorXd diag(m), sub(std::max(1, m - 1));
    for (int i = 0; i < m; ++i) diag(i) = alpha[i];
    for (int i = 0; i + 1 < m; ++i) sub(i) = beta[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    if (m == 1) {
      out.theta0 = diag(0);
      out.theta1 = 0.0;
      out.residual = b;
      out.ritz = V.col(0);
    } else {
      tri.computeFromTridiagonal(diag, sub.head(m - 1), Eigen::ComputeEigenvectors);
      const Eigen::VectorXd y = tri.eigenvectors().col(m - 1);
      out.theta0 = tri.eigenvalues()(m - 1);
      out.theta1 = tri.eigenvalues()(m - 2);
      out.residual = std::abs(b * y(m - 1));
      out.ritz = V.leftCols(m) * y;
    }
    out.steps = m;
    if (out.residual <= tol * std::abs(out.theta0) || b < 1e-300 || m == max_steps) break;
    beta.push_back(b);
    V.col(j + 1) = w / b;
    SV.col(j + 1) = sw / b;
  }
  return out;
}

}  // namespace detail

/**
 * Lowest eigenpair of the symmetric-definite pencil H x = E S x.
 *
 * `lower_bound` must lie strictly below the spectrum. A first shift-invert Lanczos pass at
 * that shift locates the ground state roughly; the shift is then moved just below the
 * estimate (verified by the inertia of the LDL^T factorization) and the pair is refined.
 */
inline Eigenpair lowest_eigenpair(const SparseMatrix& H, const SparseMatrix& S, double lower_bound,
                                  double rel_tol = 1e-13) {
  using Factor = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;
  const Eigen::Index n = H.rows();
  if (n == 0) throw DomainError("lowest_eigenpair: empty problem");

  Eigen::VectorXd start = Eigen::VectorXd::Ones(n);
  for (Eigen::Index i = 0; i < n; ++i) start(i) += 0.01 * std::sin(0.37 * static_cast<double>(i));

  auto factorize = [&](double sigma, Factor& f) {
    SparseMatrix K = H - sigma * S;
    f.compute(K);
    if (f.info() != Eigen::Success) throw NumericError("lowest_eigenpair: factorization failed");
    return (f.vectorD().array() < 0.0).count();
  };

  double sigma = lower_bound;
  Factor factor;
  if (factorize(sigma, factor) != 0)
    throw NumericError("lowest_eigenpair: lower bound is not below the spectrum");

  auto rough = detail::shift_invert_lanczos(factor, S, start, 60, 1e-6);
  double e0 = sigma + 1.0 / rough.theta0;
  double e1 = rough.theta1 > 0.0 ? sigma + 1.0 / rough.theta1 : e0 + std::abs(e0) + 1.0;

  Eigenpair result;
  result.iterations = rough.steps;
  // Move the shift below the rough estimate; the estimate is an upper bound on E0.
  double margin = std::max(0.25 * (e1 - e0), 1e-8 * std::max(1.0, std::abs(e0)));
  double shift = e0 - margin;
  for (int attempt = 0; attempt < 40; ++attempt) {
    if (shift <= sigma) {
      shift = sigma;
      factorize(shift, factor);
      break;
    }
    if (factorize(shift, factor) == 0) break;
    margin *= 2.0;
    shift = e0 - margin;
  }
  auto fine = detail::shift_invert_lanczos(factor, S, rough.ritz, 400, rel_tol);
  result.iterations += fine.steps;
  result.value = shift + 1.0 / fine.theta0;
  result.next_value = fine.theta1 > 0.0 ? shift + 1.0 / fine.theta1 : e1;
  Eigen::VectorXd x = fine.ritz;
  const double nrm = std::sqrt(x.dot(S * x));
  result.vector = x / nrm;
  // Rayleigh quotient is the most accurate energy estimate available.
  result.value = result.vector.dot(H * result.vector);
  if (fine.residual > 1e-6 * std::abs(fine.theta0))
    throw NumericError("lowest_eigenpair: Lanczos did not converge");
  return result;
}

}  // namespace dsq
