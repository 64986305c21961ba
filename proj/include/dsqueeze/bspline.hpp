#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dsqueeze/errors.hpp"

namespace dsq {

enum class Spacing { uniform, quadratic, graded };

inline std::string to_string(Spacing s) {
  switch (s) {
    case Spacing::uniform: return "uniform";
    case Spacing::quadratic: return "quadratic";
    case Spacing::graded: return "graded";
  }
  return "graded";
}

inline Spacing spacing_from_string(const std::string& s) {
  if (s == "uniform") return Spacing::uniform;
  if (s == "quadratic") return Spacing::quadratic;
  if (s == "graded") return Spacing::graded;
  throw DomainError("unknown grid spacing '" + s + "'");
}

/// Breakpoints 0 = x_0 < ... < x_n = extent.
inline std::vector<double> uniform_breakpoints(double extent, int intervals) {
  std::vector<double> x(intervals + 1);
  for (int i = 0; i <= intervals; ++i) x[i] = extent * i / intervals;
  return x;
}

inline std::vector<double> quadratic_breakpoints(double extent, int intervals) {
  std::vector<double> x(intervals + 1);
  for (int i = 0; i <= intervals; ++i) {
    const double t = static_cast<double>(i) / intervals;
    x[i] = extent * t * t;
  }
  return x;
}

/**
 * Uniform spacing `h_core` up to `core_extent`, then geometric growth by `growth`
 * per interval, capped at `h_max`. The last interval is stretched to land on `extent`.
 */
inline std::vector<double> graded_breakpoints(double extent, double h_core, double core_extent,
                                              double growth, double h_max) {
  if (!(extent > 0.0) || !(h_core > 0.0)) throw DomainError("graded_breakpoints: bad scales");
  std::vector<double> x{0.0};
  double h = h_core;
  while (x.back() < extent) {
    double next = x.back() + h;
    if (next > core_extent) h = std::min(h * growth, h_max);
    if (next >= extent - 0.3 * h) next = extent;
    x.push_back(next);
  }
  return x;
}

/**
 * B-spline basis of order k (degree k-1) on a breakpoint sequence, with k-fold knots at
 * both ends. Basis function i is supported on knot intervals [t_i, t_{i+k}).
 */
class BSplineBasis {
 public:
  BSplineBasis() = default;

  BSplineBasis(std::vector<double> breakpoints, int order)
      : breaks_(std::move(breakpoints)), order_(order) {
    if (order_ < 2) throw DomainError("BSplineBasis: order must be >= 2");
    if (breaks_.size() < 2) throw DomainError("BSplineBasis: need at least one interval");
    for (std::size_t i = 1; i < breaks_.size(); ++i)
      if (!(breaks_[i] > breaks_[i - 1]))
        throw DomainError("BSplineBasis: breakpoints must increase strictly");
    knots_.assign(order_ - 1, breaks_.front());
    knots_.insert(knots_.end(), breaks_.begin(), breaks_.end());
    knots_.insert(knots_.end(), order_ - 1, breaks_.back());
  }

  int order() const { return order_; }
  int intervals() const { return static_cast<int>(breaks_.size()) - 1; }
  int size() const { return intervals() + order_ - 1; }
  const std::vector<double>& breakpoints() const { return breaks_; }
  double left() const { return breaks_.front(); }
  double right() const { return breaks_.back(); }

  /// Interval index containing x (clamped to the domain).
  int interval_of(double x) const {
    if (x <= breaks_.front()) return 0;
    if (x >= breaks_.back()) return intervals() - 1;
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
    return static_cast<int>(it - breaks_.begin()) - 1;
  }

  /**
   * Evaluates the k non-vanishing basis functions on interval `iv` at x, together with
   * their first derivatives. Returns the index of the first of them.
   */
  int evaluate(int iv, double x, double* values, double* derivs) const {
    const int k = order_;
    const int mu = iv + k - 1;  // knot index with t_mu <= x < t_{mu+1}
    // Cox-de Boor triangle up to order k-1, then one more step for values and derivatives.
    double left[16], right[16], b[16];
    b[0] = 1.0;
    for (int j = 1; j < k - 1; ++j) {
      left[j] = x - knots_[mu + 1 - j];
      right[j] = knots_[mu + j] - x;
      double saved = 0.0;
      for (int r = 0; r < j; ++r) {
        const double tmp = b[r] / (right[r + 1] + left[j - r]);
        b[r] = saved + right[r + 1] * tmp;
        saved = left[j - r] * tmp;
      }
      b[j] = saved;
    }
    // b holds the k-1 order-(k-1) splines B_{mu-k+2..mu}
    if (derivs != nullptr) {
      for (int r = 0; r < k; ++r) derivs[r] = 0.0;
      for (int r = 0; r < k - 1; ++r) {
        const int i = mu - k + 2 + r;
        const double denom = knots_[i + k - 1] - knots_[i];
        const double c = (k - 1) * b[r] / denom;
        derivs[r + 1] += c;
        derivs[r] -= c;
      }
    }
    {
      const int j = k - 1;
      left[j] = x - knots_[mu + 1 - j];
      right[j] = knots_[mu + j] - x;
      double saved = 0.0;
      for (int r = 0; r < j; ++r) {
        const double tmp = b[r] / (right[r + 1] + left[j - r]);
        b[r] = saved + right[r + 1] * tmp;
        saved = left[j - r] * tmp;
      }
      b[j] = saved;
    }
    for (int r = 0; r < k; ++r) values[r] = b[r];
    return mu - k + 1;
  }

  /// Value of sum_i c_i B_i(x) for a coefficient vector over the full basis.
  template <class Vec>
  double expand(const Vec& coeffs, double x) const {
    if (x < left() || x > right()) return 0.0;
    double v[16];
    const int iv = interval_of(x);
    const int first = evaluate(iv, x, v, nullptr);
    double s = 0.0;
    for (int r = 0; r < order_; ++r) s += coeffs[first + r] * v[r];
    return s;
  }

 private:
  std::vector<double> breaks_;
  std::vector<double> knots_;
  int order_ = 0;
};

}  // namespace dsq
