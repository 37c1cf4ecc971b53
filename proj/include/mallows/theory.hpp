#pragma once

// Rate functions, actions and their minimizers, exact inversion generating
// polynomials, log-space partition functions and their n -> infinity limits.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "mallows/closed_forms.hpp"
#include "mallows/core.hpp"
#include "mallows/parallel.hpp"
#include "mallows/permuton.hpp"
#include "mallows/quadrature.hpp"

namespace mallows {

using BigInt = boost::multiprecision::cpp_int;
using BigFloat = boost::multiprecision::cpp_bin_float_50;

// ---------------------------------------------------------------------------
// Rate functions and actions

namespace detail {
inline double xlogx(double x) { return x <= 0.0 ? 0.0 : x * std::log(x); }
}  // namespace detail

/// J(y) = (1+y)/2 log(1+y) + (1-y)/2 log(1-y) on [-1, 1].
inline double rate_J(double y) {
  if (!(y >= -1.0 && y <= 1.0)) throw std::domain_error("rate_J: argument outside [-1,1]");
  return 0.5 * (detail::xlogx(1.0 + y) + detail::xlogx(1.0 - y));
}

/// J'(y) = atanh(y).
inline double rate_J_derivative(double y) { return std::atanh(y); }

/// rho log rho + (1-rho) log(1-rho).
inline double binary_negentropy(double r) { return detail::xlogx(r) + detail::xlogx(1.0 - r); }

/// 2 * integral of J(phi'); exact for the piecewise-linear excursion.
inline double rate_H231(const Excursion& phi) {
  const int m = phi.intervals();
  const auto& v = phi.values();
  double s = 0.0;
  for (int k = 0; k < m; ++k) s += rate_J(std::clamp((v[k + 1] - v[k]) * m, -1.0, 1.0));
  return 2.0 * s / m;
}

inline double rate_H321(const MeasurePairD& pair) {
  const auto& a = pair.first();
  const auto& b = pair.second();
  double s = 0.0;
  for (int k = 0; k < a.cells(); ++k) s += binary_negentropy(std::clamp(a.density()[k], 0.0, 1.0)) / a.cells();
  for (int k = 0; k < b.cells(); ++k) s += binary_negentropy(std::clamp(b.density()[k], 0.0, 1.0)) / b.cells();
  return s + 2.0 * std::numbers::ln2;
}

/// H(phi) - 2 beta * integral of phi.
inline double action_231(double beta, const Excursion& phi) {
  const int m = phi.intervals();
  const auto& v = phi.values();
  double area = 0.0;
  for (int k = 0; k < m; ++k) area += 0.5 * (v[k] + v[k + 1]) / m;
  return rate_H231(phi) - 2.0 * beta * area;
}

/// H(pi1, pi2) - beta * integral of x (rho1 - rho2).
inline double action_321(double beta, const MeasurePairD& pair) {
  auto moment = [](const StepMeasure& s) {
    double acc = 0.0;
    const double m = s.cells();
    for (int k = 0; k < s.cells(); ++k) acc += s.density()[k] * ((k + 1) * (k + 1) - k * k) / (2.0 * m * m);
    return acc;
  };
  return rate_H321(pair) - beta * (moment(pair.first()) - moment(pair.second()));
}

/// Action of a smooth excursion given phi and phi' as functions, by quadrature.
inline double action_231(double beta, const std::function<double(double)>& phi,
                         const std::function<double(double)>& dphi, double tol = 1e-11) {
  QuadratureOptions opt;
  opt.abs_tol = tol;
  const double h = 2.0 * integrate([&](double t) { return rate_J(std::clamp(dphi(t), -1.0, 1.0)); }, 0.0, 1.0, opt);
  return h - 2.0 * beta * integrate(phi, 0.0, 1.0, opt);
}

/// Action of a pair with smooth densities, by quadrature.
inline double action_321(double beta, const std::function<double(double)>& rho1,
                         const std::function<double(double)>& rho2, double tol = 1e-11) {
  QuadratureOptions opt;
  opt.abs_tol = tol;
  const double h = integrate([&](double x) { return binary_negentropy(rho1(x)) + binary_negentropy(rho2(x)); }, 0.0,
                             1.0, opt) +
                   2.0 * std::numbers::ln2;
  return h - beta * integrate([&](double x) { return x * (rho1(x) - rho2(x)); }, 0.0, 1.0, opt);
}

/// Closed-form minimizer phi_beta on an m-grid.
inline Excursion minimizer_231(double beta, int m = 1024) {
  return Excursion::sample([beta](double t) { return closed::excursion_231(beta, t); }, m);
}

/// Closed-form minimizer (rho1, rho2) with exact cell averages on an m-grid.
inline MeasurePairD minimizer_321(double beta, int m = 1024) { return limit_measure_pair_321(beta, m); }

/// A_beta at the closed-form minimizer (canonical patterns), by quadrature of the continuous formulas.
inline double minimal_action(Pattern3 alpha, double beta) {
  if (!is_canonical(alpha)) throw std::invalid_argument("minimal_action needs a canonical pattern");
  if (alpha == Pattern3::p231) {
    return action_231(
        beta, [beta](double t) { return closed::excursion_231(beta, t); },
        [beta](double t) { return closed::excursion_231_derivative(beta, t); });
  }
  return action_321(
      beta, [beta](double x) { return closed::density_pair_321(beta, x).first; },
      [beta](double x) { return closed::density_pair_321(beta, x).second; });
}

// ---------------------------------------------------------------------------
// Exact generating polynomials

inline constexpr int kMaxExactN = 60;

/// sum over avoiders of q^inv, coefficient k = number of avoiders with k inversions.
struct InvGenPoly {
  Pattern3 pattern = Pattern3::p231;
  int n = 0;
  std::vector<BigInt> coeffs;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }

  BigInt at_one() const {
    BigInt s = 0;
    for (const auto& c : coeffs) s += c;
    return s;
  }

  /// (1/n) log Z at q = e^{beta/n}, in 50-digit floating point.
  BigFloat log_z_over_n(double beta) const {
    using boost::multiprecision::exp;
    using boost::multiprecision::log;
    const BigFloat lq = BigFloat(beta) / std::max(n, 1);
    BigFloat s = 0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      if (coeffs[k] != 0) s += BigFloat(coeffs[k]) * exp(lq * static_cast<long>(k));
    }
    return log(s) / std::max(n, 1);
  }

  std::string to_string() const {
    std::string out;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      if (coeffs[k] == 0) continue;
      if (!out.empty()) out += " + ";
      const std::string c = coeffs[k].str();
      if (k == 0) out += c;
      else out += (c == "1" ? "" : c) + (k == 1 ? "q" : "q^" + std::to_string(k));
    }
    return out.empty() ? "0" : out;
  }

  bool operator==(const InvGenPoly&) const = default;
};

namespace detail {
using Poly = std::vector<BigInt>;

inline void add_shifted(Poly& dst, const Poly& src, std::size_t shift) {
  if (src.empty()) return;
  if (dst.size() < src.size() + shift) dst.resize(src.size() + shift);
  for (std::size_t k = 0; k < src.size(); ++k) dst[k + shift] += src[k];
}
}  // namespace detail

/// 231: Dyck DP with weight q^h on an up step leaving height h.
/// 321: DP over pairs of steps on the half height H = d(2m)/2 with weight
/// q^{H(2m)}; a level pair (UD, or DU when H >= 1) has multiplicity 1 or 2.
inline InvGenPoly partition_poly(Pattern3 alpha, int n) {
  if (n < 0) throw std::invalid_argument("partition_poly: negative size");
  if (n > kMaxExactN) throw std::out_of_range("partition_poly: n exceeds the exact cap");
  const Pattern3 c = canonical(alpha);
  using detail::Poly;
  InvGenPoly out{alpha, n, {}};
  if (n == 0) {
    out.coeffs = {1};
    return out;
  }
  std::vector<Poly> cur(n + 2), next(n + 2);
  cur[0] = {1};
  if (c == Pattern3::p231) {
    for (int step = 0; step < 2 * n; ++step) {
      for (auto& p : next) p.clear();
      for (int h = 0; h <= n; ++h) {
        if (cur[h].empty()) continue;
        if (h + 1 <= n) detail::add_shifted(next[h + 1], cur[h], h);
        if (h >= 1) detail::add_shifted(next[h - 1], cur[h], 0);
      }
      std::swap(cur, next);
    }
  } else {
    for (int m = 0; m < n; ++m) {
      for (auto& p : next) p.clear();
      for (int h = 0; h <= n; ++h) {
        if (cur[h].empty()) continue;
        if (h + 1 <= n) detail::add_shifted(next[h + 1], cur[h], h + 1);
        detail::add_shifted(next[h], cur[h], h);
        if (h >= 1) {
          detail::add_shifted(next[h], cur[h], h);
          detail::add_shifted(next[h - 1], cur[h], h - 1);
        }
      }
      std::swap(cur, next);
    }
  }
  out.coeffs = cur[0];
  if (flips_inversions(alpha)) {
    // inv_alpha = C(n,2) - inv of the canonical image
    out.coeffs.resize(static_cast<std::size_t>(n) * (n - 1) / 2 + 1);
    std::reverse(out.coeffs.begin(), out.coeffs.end());
  }
  while (out.coeffs.size() > 1 && out.coeffs.back() == 0) out.coeffs.pop_back();
  return out;
}

/// (1/n) log Z_n at q = e^{beta/n}: the same DPs with every state held as a
/// logarithm. Forward weights are largest on heights whose completions are
/// cheapest, so a single common scale would underflow the states that matter.
inline double partition_log(Pattern3 alpha, int n, double beta) {
  if (n < 1) throw std::invalid_argument("partition_log: n must be positive");
  if (!std::isfinite(beta)) throw std::invalid_argument("partition_log: beta must be finite");
  if (flips_inversions(alpha)) {
    return beta * (n - 1) / (2.0 * n) + partition_log(canonical(alpha), n, -beta);
  }
  alpha = canonical(alpha);
  constexpr double none = -std::numeric_limits<double>::infinity();
  const double lq = beta / n;
  const double log2 = std::numbers::ln2;
  std::vector<double> cur(n + 2, none), next(n + 2, none);
  cur[0] = 0.0;
  if (alpha == Pattern3::p231) {
    for (int step = 0; step < 2 * n; ++step) {
      const int top = std::min(step + 1, 2 * n - step - 1);  // heights that can still return to 0
      for (int h = 0; h <= top; ++h) {
        const double up = h >= 1 ? cur[h - 1] + lq * (h - 1) : none;
        const double down = cur[h + 1];
        next[h] = closed::log_add_exp(up, down);
      }
      std::fill(next.begin() + top + 1, next.end(), none);
      std::swap(cur, next);
    }
  } else {
    for (int m = 0; m < n; ++m) {
      const int top = std::min(m + 1, n - m - 1);
      for (int h = 0; h <= top; ++h) {
        const double up = h >= 1 ? cur[h - 1] : none;
        const double level = cur[h] + (h >= 1 ? log2 : 0.0);
        const double down = cur[h + 1];
        next[h] = lq * h + closed::log_add_exp(closed::log_add_exp(up, level), down);
      }
      std::fill(next.begin() + top + 1, next.end(), none);
      std::swap(cur, next);
    }
  }
  return cur[0] / n;
}

/// lim (1/n) log Z_n. With y = e^s the integrals become
///   231: 2 softplus(beta) - beta - (1/beta) * int_{-beta}^{beta} s logistic(s) ds
///   321: (2/beta) * int_{-beta/2}^{beta/2} softplus(s) ds
/// and log 4 for beta <= 0. Reverse and complement classes get beta/2 + L(-beta).
inline double partition_limit(Pattern3 alpha, double beta) {
  if (flips_inversions(alpha)) return 0.5 * beta + partition_limit(canonical(alpha), -beta);
  if (beta <= 0) return 2.0 * std::numbers::ln2;
  QuadratureOptions opt;
  opt.abs_tol = 1e-10 * std::min(1.0, beta);
  if (canonical(alpha) == Pattern3::p231) {
    const double i = integrate([](double s) { return s * closed::logistic(s); }, -beta, beta, opt);
    return 2.0 * closed::softplus(beta) - beta - i / beta;
  }
  const double i = integrate([](double s) { return closed::softplus(s); }, -0.5 * beta, 0.5 * beta, opt);
  return 2.0 * i / beta;
}

struct PartitionRow {
  int n = 0;
  double log_z_over_n = 0.0;
  double limit = 0.0;
  double residual = 0.0;  // |log_z_over_n - limit|
};

struct LogPartitionTable {
  Pattern3 pattern = Pattern3::p231;
  double beta = 0.0;
  std::vector<PartitionRow> rows;

  bool residuals_strictly_decreasing() const {
    for (std::size_t k = 1; k < rows.size(); ++k)
      if (!(rows[k].residual < rows[k - 1].residual)) return false;
    return true;
  }
};

/// Rows are computed in parallel across n.
inline LogPartitionTable partition_convergence(Pattern3 alpha, double beta, const std::vector<int>& ns) {
  LogPartitionTable t{alpha, beta, std::vector<PartitionRow>(ns.size())};
  const double lim = partition_limit(alpha, beta);
  parallel_for(ns.size(), [&](std::size_t k) {
    const double v = partition_log(alpha, ns[k], beta);
    t.rows[k] = {ns[k], v, lim, std::abs(v - lim)};
  });
  return t;
}

}  // namespace mallows
