#pragma once

// Adaptive Simpson quadrature with an absolute tolerance.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace mallows {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  std::size_t max_intervals = std::size_t{1} << 20;
};

namespace detail {

template <class F>
struct SimpsonState {
  const F& f;
  std::size_t intervals = 1;
  std::size_t max_intervals;
};

template <class F>
double simpson_recurse(SimpsonState<F>& st, double a, double b, double fa, double fm, double fb, double whole,
                       double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = st.f(lm), frm = st.f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || st.intervals >= st.max_intervals || std::abs(diff) <= 15.0 * tol) {
    return left + right + diff / 15.0;
  }
  ++st.intervals;
  return simpson_recurse(st, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_recurse(st, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Integral of f over [a, b]. The first split is forced so that symmetric
/// integrands cannot fool the initial error estimate.
template <class F>
double integrate(const F& f, double a, double b, const QuadratureOptions& opt = {}) {
  if (!(a <= b)) throw std::invalid_argument("integrate: need a <= b");
  if (a == b) return 0.0;
  detail::SimpsonState<F> st{f, 2, opt.max_intervals};
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double l = 0.5 * (a + m), r = 0.5 * (m + b);
  const double fl = f(l), fr = f(r);
  const double left = (m - a) / 6.0 * (fa + 4.0 * fl + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * fr + fb);
  return detail::simpson_recurse(st, a, m, fa, fl, fm, left, 0.5 * opt.abs_tol, 48) +
         detail::simpson_recurse(st, m, b, fm, fr, fb, right, 0.5 * opt.abs_tol, 48);
}

/// Same, split at the given interior points (kinks or corners of the integrand).
template <class F>
double integrate(const F& f, double a, double b, std::vector<double> breakpoints, const QuadratureOptions& opt = {}) {
  breakpoints.erase(std::remove_if(breakpoints.begin(), breakpoints.end(), [&](double x) { return !(x > a && x < b); }),
                    breakpoints.end());
  std::sort(breakpoints.begin(), breakpoints.end());
  QuadratureOptions piece = opt;
  piece.abs_tol = opt.abs_tol / static_cast<double>(breakpoints.size() + 1);
  double total = 0.0, lo = a;
  for (double x : breakpoints) {
    total += integrate(f, lo, x, piece);
    lo = x;
  }
  return total + integrate(f, lo, b, piece);
}

}  // namespace mallows
