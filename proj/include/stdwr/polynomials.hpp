#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace stdwr {

/// Quadrature rule on the unit interval [0,1]; weights sum to one.
template <typename Scalar>
struct QuadratureRule1D {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> points;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;

  Eigen::Index size() const { return points.size(); }
};

namespace detail {

// (P_n(x), P_n'(x)) on [-1,1] by the three-term recurrence.
template <typename Scalar>
std::pair<Scalar, Scalar> legendre_with_derivative(int n, Scalar x) {
  if (n == 0) return {Scalar(1), Scalar(0)};
  Scalar p_prev = 1;
  Scalar p = x;
  for (int k = 2; k <= n; ++k) {
    const Scalar p_next = ((2 * k - 1) * x * p - (k - 1) * p_prev) / k;
    p_prev = p;
    p = p_next;
  }
  // derivative from (1-x^2) P_n' = n (P_{n-1} - x P_n); only valid off the endpoints
  const Scalar dp = n * (p_prev - x * p) / (Scalar(1) - x * x);
  return {p, dp};
}

}  // namespace detail

/// n-point Gauss-Legendre rule mapped to [0,1]; exact for polynomials of degree 2n-1.
template <typename Scalar = double>
QuadratureRule1D<Scalar> gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one point");
  QuadratureRule1D<Scalar> rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    Scalar x = std::cos(std::numbers::pi_v<Scalar> * (i + Scalar(0.75)) / (n + Scalar(0.5)));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = detail::legendre_with_derivative(n, x);
      const Scalar dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 4 * std::numeric_limits<Scalar>::epsilon()) break;
    }
    const auto [p, dp] = detail::legendre_with_derivative(n, x);
    (void)p;
    // ascending order on [0,1]
    const int j = n - 1 - i;
    rule.points(j) = (Scalar(1) + x) / 2;
    rule.weights(j) = Scalar(1) / ((Scalar(1) - x * x) * dp * dp);
  }
  return rule;
}

/// n-point Gauss-Lobatto rule on [0,1] (n >= 2), endpoints included; exact for degree 2n-3.
template <typename Scalar = double>
QuadratureRule1D<Scalar> gauss_lobatto(int n) {
  if (n < 2) throw std::invalid_argument("gauss_lobatto: need at least two points");
  QuadratureRule1D<Scalar> rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  const int m = n - 1;  // interior nodes are the roots of P_m'
  rule.points(0) = 0;
  rule.points(n - 1) = 1;
  for (int i = 1; i < m; ++i) {
    Scalar x = -std::cos(std::numbers::pi_v<Scalar> * i / m);
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = detail::legendre_with_derivative(m, x);
      // (1-x^2) P'' = 2x P' - m(m+1) P
      const Scalar ddp = (2 * x * dp - m * (m + 1) * p) / (Scalar(1) - x * x);
      const Scalar dx = dp / ddp;
      x -= dx;
      if (std::abs(dx) < 4 * std::numeric_limits<Scalar>::epsilon()) break;
    }
    rule.points(i) = (Scalar(1) + x) / 2;
  }
  for (int i = 0; i < n; ++i) {
    const Scalar x = 2 * rule.points(i) - 1;
    const auto [p, dp] = detail::legendre_with_derivative(m, x);
    (void)dp;
    rule.weights(i) = Scalar(1) / (m * (m + 1) * p * p);
  }
  return rule;
}

/// Lagrange polynomials on a fixed set of distinct nodes.
template <typename Scalar = double>
class LagrangeBasis1D {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  LagrangeBasis1D() = default;

  explicit LagrangeBasis1D(Vector nodes) : nodes_(std::move(nodes)) {
    const Eigen::Index n = nodes_.size();
    if (n < 1) throw std::invalid_argument("LagrangeBasis1D: empty node set");
    inv_denominator_.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      Scalar d = 1;
      for (Eigen::Index j = 0; j < n; ++j)
        if (j != i) d *= nodes_(i) - nodes_(j);
      if (d == Scalar(0)) throw std::invalid_argument("LagrangeBasis1D: repeated node");
      inv_denominator_(i) = Scalar(1) / d;
    }
  }

  Eigen::Index size() const { return nodes_.size(); }
  int degree() const { return static_cast<int>(nodes_.size()) - 1; }
  const Vector& nodes() const { return nodes_; }

  Vector values(Scalar x) const {
    const Eigen::Index n = nodes_.size();
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      Scalar prod = 1;
      for (Eigen::Index j = 0; j < n; ++j)
        if (j != i) prod *= x - nodes_(j);
      v(i) = prod * inv_denominator_(i);
    }
    return v;
  }

  Vector derivatives(Scalar x) const {
    const Eigen::Index n = nodes_.size();
    Vector d = Vector::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      Scalar sum = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        Scalar prod = 1;
        for (Eigen::Index k = 0; k < n; ++k)
          if (k != i && k != j) prod *= x - nodes_(k);
        sum += prod;
      }
      d(i) = sum * inv_denominator_(i);
    }
    return d;
  }

 private:
  Vector nodes_;
  Vector inv_denominator_;
};

}  // namespace stdwr
