#pragma once

// Closed-form limit shapes. Every beta-dependent formula is written in
// log-sum form so that beta in the hundreds neither overflows nor cancels.
// For beta <= 0 all shapes are the diagonal ones.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

namespace mallows::closed {

inline double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

inline double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

// log(-expm1(z)) for z <= 0, i.e. log(1 - e^z).
inline double log_one_minus_exp(double z) {
  if (z >= 0) return -std::numeric_limits<double>::infinity();
  return z > -std::numbers::ln2 ? std::log(-std::expm1(z)) : std::log1p(-std::exp(z));
}

// ---------------------------------------------------------------------------
// 231

/// log(e^{-beta} + 1 - e^{beta(x-1)}), so that f = -L / beta.
inline double log_denominator_231(double beta, double x) {
  return log_add_exp(-beta, log_one_minus_exp(beta * (x - 1.0)));
}

inline double rlm_curve_231(double beta, double x) {
  if (beta <= 0) return x;
  return -log_denominator_231(beta, x) / beta;
}

inline double rlm_curve_231_derivative(double beta, double x) {
  if (beta <= 0) return 1.0;
  return std::exp(beta * (x - 1.0) - log_denominator_231(beta, x));
}

/// Point where the 231 curve has slope one; the antidiagonal part ends there.
inline double x_star(double beta) {
  if (beta <= 0) return 0.5;
  return (softplus(beta) - std::numbers::ln2) / beta;
}

inline double excursion_231(double beta, double t) {
  if (beta <= 0) return 0.0;
  return (softplus(beta) - softplus(beta * (1.0 - 2.0 * t))) / beta - t;
}

inline double excursion_231_derivative(double beta, double t) {
  if (beta <= 0) return 0.0;
  return std::tanh(0.5 * beta * (1.0 - 2.0 * t));
}

// ---------------------------------------------------------------------------
// 321

inline double rlm_curve_321(double beta, double x) {
  if (beta <= 0) return x;
  const double num = log_add_exp(beta * x, 0.5 * beta);
  const double den = beta + log_add_exp(log_add_exp(-beta, -0.5 * beta), log_one_minus_exp(beta * (x - 1.0)));
  return std::clamp(0.5 + (num - den) / beta, 0.0, 1.0);
}

inline double rlm_curve_321_derivative(double beta, double x) {
  if (beta <= 0) return 1.0;
  const double den = beta + log_add_exp(log_add_exp(-beta, -0.5 * beta), log_one_minus_exp(beta * (x - 1.0)));
  return logistic(beta * (x - 0.5)) + std::exp(beta * x - den);
}

/// (rho1, rho2): the densities of the position and value measures.
inline std::pair<double, double> density_pair_321(double beta, double x) {
  if (beta <= 0) return {0.5, 0.5};
  return {logistic(beta * (x - 0.5)), logistic(beta * (0.5 - x))};
}

/// Integral of rho1 over [0, x].
inline double cdf1_321(double beta, double x) {
  if (beta <= 0) return 0.5 * x;
  return (softplus(beta * (x - 0.5)) - softplus(-0.5 * beta)) / beta;
}

inline double cdf2_321(double beta, double x) { return x - cdf1_321(beta, x); }

}  // namespace mallows::closed
