#pragma once

// Permutons and the objects that parametrize them: excursions, subuniform
// step measures and their pairs, grid CDFs, right-to-left-minima curves,
// monotone couplings, and weighted-curve permutons given in closed form.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mallows/closed_forms.hpp"
#include "mallows/core.hpp"
#include "mallows/dyck.hpp"
#include "mallows/quadrature.hpp"
#include "mallows/rng.hpp"

namespace mallows {

// ---------------------------------------------------------------------------
// Excursions

/// Piecewise-linear function on the uniform grid t_k = k/m, k = 0..m.
class Excursion {
public:
  Excursion() : values_{0.0, 0.0} {}

  explicit Excursion(std::vector<double> values, double tol = 1e-12) : values_(std::move(values)) {
    if (values_.size() < 2) throw std::invalid_argument("excursion needs at least two grid points");
    const double dt = 1.0 / intervals();
    if (std::abs(values_.front()) > tol || std::abs(values_.back()) > tol) {
      throw std::invalid_argument("excursion must vanish at both ends");
    }
    for (std::size_t k = 0; k < values_.size(); ++k) {
      if (values_[k] < -tol) throw std::invalid_argument("excursion must be nonnegative");
      if (k > 0 && std::abs(values_[k] - values_[k - 1]) > dt * (1.0 + 1e-9) + tol) {
        throw std::invalid_argument("excursion must be 1-Lipschitz");
      }
    }
  }

  static Excursion zero(int m) { return Excursion(std::vector<double>(m + 1, 0.0)); }

  /// min(t, 1 - t) on an m-grid (m even keeps the peak on a node).
  static Excursion tent(int m) {
    std::vector<double> v(m + 1);
    for (int k = 0; k <= m; ++k) v[k] = std::min(k, m - k) / static_cast<double>(m);
    return Excursion(std::move(v));
  }

  template <class Fn>
  static Excursion sample(Fn&& fn, int m) {
    std::vector<double> v(m + 1);
    for (int k = 0; k <= m; ++k) v[k] = fn(static_cast<double>(k) / m);
    v.front() = 0.0;
    v.back() = 0.0;
    return Excursion(std::move(v), 1e-9);
  }

  int intervals() const noexcept { return static_cast<int>(values_.size()) - 1; }
  const std::vector<double>& values() const noexcept { return values_; }

  double operator()(double t) const {
    const int m = intervals();
    const double s = std::clamp(t, 0.0, 1.0) * m;
    const int k = std::min(static_cast<int>(s), m - 1);
    const double frac = s - k;
    return values_[k] + frac * (values_[k + 1] - values_[k]);
  }

  double sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

private:
  std::vector<double> values_;
};

inline Excursion excursion_of_path(const DyckPath& d) {
  const double scale = 1.0 / d.length();
  std::vector<double> v(d.heights().size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = d.heights()[k] * scale;
  return Excursion(std::move(v));
}

/// phi(k / 2n) = d(k) / 2n for the 231 path of p.
inline Excursion empirical_excursion(const Permutation& p) { return excursion_of_path(perm_to_dyck_231(p)); }

// ---------------------------------------------------------------------------
// Subuniform step measures

/// Density constant on each of m equal cells of [0,1], with values in [0,1].
class StepMeasure {
public:
  StepMeasure() = default;

  explicit StepMeasure(std::vector<double> density, double tol = 1e-12) : density_(std::move(density)) {
    if (density_.empty()) throw std::invalid_argument("step measure needs at least one cell");
    for (double r : density_) {
      if (!(r >= -tol && r <= 1.0 + tol)) throw std::invalid_argument("step density must lie in [0,1]");
    }
    cumulative_.resize(density_.size() + 1, 0.0);
    const double h = 1.0 / cells();
    for (int k = 0; k < cells(); ++k) cumulative_[k + 1] = cumulative_[k] + density_[k] * h;
  }

  static StepMeasure uniform(int m, double level = 1.0) { return StepMeasure(std::vector<double>(m, level)); }

  int cells() const noexcept { return static_cast<int>(density_.size()); }
  const std::vector<double>& density() const noexcept { return density_; }
  /// CDF at the cell boundaries k/m.
  const std::vector<double>& boundary_cdf() const noexcept { return cumulative_; }
  double mass() const noexcept { return cumulative_.back(); }

  double cdf(double x) const {
    if (x <= 0) return 0.0;
    if (x >= 1) return mass();
    const double s = x * cells();
    const int k = std::min(static_cast<int>(s), cells() - 1);
    return cumulative_[k] + (s - k) / cells() * density_[k];
  }

  /// Leb - this.
  StepMeasure complement() const {
    std::vector<double> c(density_.size());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = 1.0 - density_[k];
    return StepMeasure(std::move(c), 1e-12);
  }

private:
  std::vector<double> density_;
  std::vector<double> cumulative_;
};

/// sup{x : F(x) <= u} for 0 < u < mass.
inline double quantile(const StepMeasure& m, double u) {
  if (!(u > 0.0 && u < m.mass())) throw std::out_of_range("quantile level outside (0, mass)");
  const auto& c = m.boundary_cdf();
  // first boundary strictly above u
  const auto it = std::upper_bound(c.begin(), c.end(), u);
  const int k = static_cast<int>(it - c.begin()) - 1;  // c[k] <= u < c[k+1]
  return static_cast<double>(k) / m.cells() + (u - c[k]) / m.density()[k];
}

/// Pair of subuniform measures with equal mass and pi1([0,x]) <= pi2([0,x]).
class MeasurePairD {
public:
  MeasurePairD() = default;
  MeasurePairD(StepMeasure first, StepMeasure second, double tol = 1e-9)
      : first_(std::move(first)), second_(std::move(second)) {
    if (std::abs(first_.mass() - second_.mass()) > tol) throw std::invalid_argument("measure pair: unequal masses");
    std::vector<double> pts;
    for (int k = 0; k <= first_.cells(); ++k) pts.push_back(static_cast<double>(k) / first_.cells());
    for (int k = 0; k <= second_.cells(); ++k) pts.push_back(static_cast<double>(k) / second_.cells());
    for (double x : pts) {
      if (first_.cdf(x) > second_.cdf(x) + tol) throw std::invalid_argument("measure pair: CDF domination fails");
    }
  }

  const StepMeasure& first() const noexcept { return first_; }
  const StepMeasure& second() const noexcept { return second_; }

private:
  StepMeasure first_, second_;
};

/// Indicator densities of the strict right-to-left-minima positions and values.
inline MeasurePairD empirical_measure_pair(const Permutation& p) {
  if (!avoids(Pattern3::p321, p)) throw std::invalid_argument("permutation contains 321");
  const auto ab = strict_rl_minima(p);
  std::vector<double> r1(p.size(), 0.0), r2(p.size(), 0.0);
  for (int a : ab.positions) r1[a - 1] = 1.0;
  for (int b : ab.values) r2[b - 1] = 1.0;
  return MeasurePairD(StepMeasure(std::move(r1)), StepMeasure(std::move(r2)));
}

// ---------------------------------------------------------------------------
// Grid CDFs

/// cdf(i, j) = mu([0, i/G] x [0, j/G]).
class PermutonGrid {
public:
  PermutonGrid() = default;
  explicit PermutonGrid(int resolution) : g_(resolution), cdf_((resolution + 1) * (resolution + 1), 0.0) {
    if (resolution < 1) throw std::invalid_argument("grid resolution must be positive");
  }

  int resolution() const noexcept { return g_; }
  double& at(int i, int j) { return cdf_[static_cast<std::size_t>(i) * (g_ + 1) + j]; }
  double at(int i, int j) const { return cdf_[static_cast<std::size_t>(i) * (g_ + 1) + j]; }
  const std::vector<double>& data() const noexcept { return cdf_; }

  struct Check {
    bool ok = true;
    std::string problem;
  };

  /// Uniform marginals, monotone, and 2-increasing, all up to tol.
  Check check(double tol = 1e-9) const {
    const double G = g_;
    for (int k = 0; k <= g_; ++k) {
      if (std::abs(at(k, g_) - k / G) > tol) return {false, "first marginal not uniform at i=" + std::to_string(k)};
      if (std::abs(at(g_, k) - k / G) > tol) return {false, "second marginal not uniform at j=" + std::to_string(k)};
      if (std::abs(at(0, k)) > tol || std::abs(at(k, 0)) > tol) return {false, "nonzero mass on the boundary"};
    }
    for (int i = 1; i <= g_; ++i) {
      for (int j = 1; j <= g_; ++j) {
        const double rect = at(i, j) - at(i - 1, j) - at(i, j - 1) + at(i - 1, j - 1);
        if (rect < -tol) {
          return {false, "negative rectangle mass at (" + std::to_string(i) + "," + std::to_string(j) + ")"};
        }
      }
    }
    return {};
  }

private:
  int g_ = 0;
  std::vector<double> cdf_;
};

inline PermutonGrid tabulate(int G, const std::function<double(double, double)>& cdf) {
  PermutonGrid grid(G);
  for (int i = 0; i <= G; ++i)
    for (int j = 0; j <= G; ++j) grid.at(i, j) = cdf(static_cast<double>(i) / G, static_cast<double>(j) / G);
  return grid;
}

enum class CellVariant { plain, diag, antidiag };

/// Grid CDF of the permuton of p: mass 1/n per cell, spread uniformly over the
/// cell, over its diagonal, or over its antidiagonal.
inline PermutonGrid permuton_of_perm(const Permutation& p, CellVariant variant, int G = 256) {
  const int n = p.size();
  if (n == 0) throw std::invalid_argument("empty permutation");
  PermutonGrid grid(G);
  std::vector<double> fx(G + 1), fy(G + 1);
  for (int c = 1; c <= n; ++c) {
    const int s = p.value(c);
    for (int k = 0; k <= G; ++k) {
      fx[k] = std::clamp(static_cast<double>(k) * n / G - (c - 1), 0.0, 1.0);
      fy[k] = std::clamp(static_cast<double>(k) * n / G - (s - 1), 0.0, 1.0);
    }
    for (int i = 0; i <= G; ++i) {
      if (fx[i] == 0.0) continue;
      for (int j = 0; j <= G; ++j) {
        double frac;
        switch (variant) {
          case CellVariant::plain: frac = fx[i] * fy[j]; break;
          case CellVariant::diag: frac = std::min(fx[i], fy[j]); break;
          default: frac = std::max(0.0, fx[i] + fy[j] - 1.0); break;
        }
        grid.at(i, j) += frac / n;
      }
    }
  }
  return grid;
}

// ---------------------------------------------------------------------------
// Segment measures and monotone couplings

struct Segment {
  double x0, y0, x1, y1, weight;  // uniform mass `weight` along (x0,y0)-(x1,y1), nondecreasing
};

namespace detail {
inline double fraction_below(double v, double v0, double v1) {
  if (v1 == v0) return v >= v0 ? 1.0 : 0.0;
  return std::clamp((v - v0) / (v1 - v0), 0.0, 1.0);
}
}  // namespace detail

class SegmentMeasure {
public:
  std::vector<Segment> segments;

  double mass() const {
    double m = 0.0;
    for (const auto& s : segments) m += s.weight;
    return m;
  }

  double cdf(double x, double y) const {
    double total = 0.0;
    for (const auto& s : segments) {
      total += s.weight * std::min(detail::fraction_below(x, s.x0, s.x1), detail::fraction_below(y, s.y0, s.y1));
    }
    return total;
  }

  PermutonGrid to_grid(int G) const {
    return tabulate(G, [this](double x, double y) { return cdf(x, y); });
  }

  std::pair<double, double> sample_point(Rng& rng) const {
    if (weights_.size() != segments.size()) prepare();
    const double u = rng.uniform() * weights_.back();
    const auto k = static_cast<std::size_t>(std::upper_bound(weights_.begin(), weights_.end(), u) - weights_.begin());
    const auto& s = segments[std::min(k, segments.size() - 1)];
    const double t = rng.uniform();
    return {s.x0 + t * (s.x1 - s.x0), s.y0 + t * (s.y1 - s.y0)};
  }

  void prepare() const {
    weights_.resize(segments.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < segments.size(); ++k) weights_[k] = acc += segments[k].weight;
  }

  SegmentMeasure& operator+=(const SegmentMeasure& other) {
    segments.insert(segments.end(), other.segments.begin(), other.segments.end());
    weights_.clear();
    return *this;
  }

private:
  mutable std::vector<double> weights_;
};

/// The nondecreasing coupling (G_1, G_2)_# Leb on [0, M]. Both quantile maps are
/// linear between consecutive breakpoints of either CDF, so the coupling is a
/// union of straight segments.
inline SegmentMeasure monotone_coupling(const StepMeasure& m1, const StepMeasure& m2, double tol = 1e-9) {
  const double mass = m1.mass();
  if (std::abs(mass - m2.mass()) > tol) throw std::invalid_argument("monotone coupling: unequal masses");
  std::vector<double> levels;
  for (double c : m1.boundary_cdf()) levels.push_back(std::min(c, mass));
  for (double c : m2.boundary_cdf()) levels.push_back(std::min(c, mass));
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end(), [](double a, double b) { return b - a < 1e-15; }),
               levels.end());

  // Quantile of m at level u, continued linearly within the cell containing level `mid`.
  auto q_lin = [](const StepMeasure& m, double mid, double u) {
    const auto& c = m.boundary_cdf();
    int k = static_cast<int>(std::upper_bound(c.begin(), c.end(), mid) - c.begin()) - 1;
    k = std::clamp(k, 0, m.cells() - 1);
    const double h = 1.0 / m.cells();
    return k * h + (u - c[k]) / m.density()[k];
  };

  SegmentMeasure out;
  for (std::size_t a = 0; a + 1 < levels.size(); ++a) {
    const double u0 = levels[a], u1 = levels[a + 1];
    if (u1 > mass + 1e-15 || u1 - u0 <= 0) continue;
    const double mid = 0.5 * (u0 + u1);
    out.segments.push_back({q_lin(m1, mid, u0), q_lin(m2, mid, u0), q_lin(m1, mid, u1), q_lin(m2, mid, u1), u1 - u0});
  }
  return out;
}

/// Psi as a segment measure: pi1 coupled to pi2 plus (Leb - pi1) coupled to (Leb - pi2).
inline SegmentMeasure psi_segments(const MeasurePairD& pair) {
  SegmentMeasure s = monotone_coupling(pair.first(), pair.second());
  s += monotone_coupling(pair.first().complement(), pair.second().complement());
  return s;
}

/// Psi on a grid. A monotone coupling has CDF min(F1(x), F2(y)), which gives
/// the grid values exactly.
inline PermutonGrid psi(const MeasurePairD& pair, int G = 256) {
  return tabulate(G, [&](double x, double y) {
    const double f1 = pair.first().cdf(x), f2 = pair.second().cdf(y);
    return std::min(f1, f2) + std::min(x - f1, y - f2);
  });
}

// ---------------------------------------------------------------------------
// Right-to-left-minima curves and the 231-avoiding permuton they determine

/// Nondecreasing cadlag f on [0,1] with f(x) <= x and f(1) = 1, stored as nodes
/// x_0 = 0 < ... < x_K = 1 with left limits and values; linear between
/// (x_k, value_k) and (x_{k+1}, left_{k+1}).
class RlmCurve {
public:
  RlmCurve(std::vector<double> nodes, std::vector<double> left, std::vector<double> value, double tol = 1e-12)
      : x_(std::move(nodes)), left_(std::move(left)), value_(std::move(value)) {
    const std::size_t k = x_.size();
    if (k < 2 || left_.size() != k || value_.size() != k) throw std::invalid_argument("RLM curve: bad node arrays");
    if (x_.front() != 0.0 || x_.back() != 1.0) throw std::invalid_argument("RLM curve: nodes must span [0,1]");
    if (std::abs(value_.back() - 1.0) > tol) throw std::invalid_argument("RLM curve: f(1) must be 1");
    for (std::size_t i = 0; i < k; ++i) {
      if (i > 0 && !(x_[i] > x_[i - 1])) throw std::invalid_argument("RLM curve: nodes must increase");
      if (value_[i] < left_[i] - tol) throw std::invalid_argument("RLM curve: decreasing jump");
      if (i > 0 && left_[i] < value_[i - 1] - tol) throw std::invalid_argument("RLM curve: decreasing piece");
      if (value_[i] > x_[i] + tol || left_[i] > x_[i] + tol) throw std::invalid_argument("RLM curve: f(x) > x");
      if (value_[i] < -tol) throw std::invalid_argument("RLM curve: negative value");
    }
  }

  /// Step function F(floor(n x)) / n of an integer staircase F(0..n).
  static RlmCurve from_staircase(const std::vector<int>& f) {
    const int n = static_cast<int>(f.size()) - 1;
    std::vector<double> x(n + 1), l(n + 1), v(n + 1);
    for (int k = 0; k <= n; ++k) {
      x[k] = static_cast<double>(k) / n;
      v[k] = static_cast<double>(f[k]) / n;
      l[k] = k == 0 ? 0.0 : static_cast<double>(f[k - 1]) / n;
    }
    x[n] = 1.0;
    return RlmCurve(std::move(x), std::move(l), std::move(v));
  }

  /// Right-continuous step function with the given values on [i/G, (i+1)/G).
  static RlmCurve from_grid_steps(const std::vector<double>& values) {
    const int g = static_cast<int>(values.size()) - 1;
    std::vector<double> x(g + 1), l(g + 1);
    for (int k = 0; k <= g; ++k) {
      x[k] = static_cast<double>(k) / g;
      l[k] = k == 0 ? 0.0 : values[k - 1];
    }
    x[g] = 1.0;
    return RlmCurve(std::move(x), std::move(l), values, 1e-9);
  }

  /// Continuous f sampled on K+1 uniform nodes and joined linearly.
  template <class Fn>
  static RlmCurve from_function(Fn&& fn, int intervals) {
    std::vector<double> x(intervals + 1), v(intervals + 1);
    for (int k = 0; k <= intervals; ++k) {
      x[k] = static_cast<double>(k) / intervals;
      v[k] = std::min(fn(x[k]), x[k]);
    }
    x.back() = 1.0;
    v.front() = 0.0;
    v.back() = 1.0;
    return RlmCurve(x, v, v, 1e-9);
  }

  const std::vector<double>& nodes() const noexcept { return x_; }
  const std::vector<double>& left_limits() const noexcept { return left_; }
  const std::vector<double>& values() const noexcept { return value_; }

  double operator()(double x) const {
    if (x >= 1.0) return value_.back();
    if (x <= 0.0) return value_.front();
    const std::size_t k = piece(x);
    if (x == x_[k]) return value_[k];
    const double t = (x - x_[k]) / (x_[k + 1] - x_[k]);
    return value_[k] + t * (left_[k + 1] - value_[k]);
  }

  /// inf{t : f(t) > y}, or 1 if there is none.
  double crossing(double y) const {
    for (std::size_t k = 0; k + 1 < x_.size(); ++k) {
      if (value_[k] > y) return x_[k];
      if (left_[k + 1] > y) {
        return x_[k] + (y - value_[k]) / (left_[k + 1] - value_[k]) * (x_[k + 1] - x_[k]);
      }
    }
    return value_.back() > y ? x_.back() : 1.0;
  }

private:
  std::size_t piece(double x) const {
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    return static_cast<std::size_t>(it - x_.begin()) - 1;
  }

  std::vector<double> x_, left_, value_;
};

/// Grid CDF of the unique 231-avoiding permuton with RLM curve f. Uses
/// mu([x,1] x [0,y]) = y - x + min{x' - y' : (x',y') on the completed graph,
/// x' >= x, y' <= y} above the graph (0 below it), so cdf(x,y) = y - that.
/// Each row is a right-to-left sweep keeping the running minimum over nodes.
inline PermutonGrid permuton_from_rlm(const RlmCurve& f, int G = 256) {
  PermutonGrid grid(G);
  const auto& xs = f.nodes();
  const auto& vs = f.values();
  std::vector<double> fx(G + 1);
  for (int i = 0; i <= G; ++i) fx[i] = f(static_cast<double>(i) / G);
  for (int j = 0; j <= G; ++j) {
    const double y = static_cast<double>(j) / G;
    const double xy = f.crossing(y);
    double running = xy - y;
    int k = static_cast<int>(std::lower_bound(xs.begin(), xs.end(), xy) - xs.begin()) - 1;
    for (int i = G; i >= 0; --i) {
      const double x = static_cast<double>(i) / G;
      while (k >= 0 && xs[k] > x) {
        running = std::min(running, xs[k] - vs[k]);
        --k;
      }
      double lower_right = 0.0;
      if (fx[i] <= y) lower_right = y - x + std::min(running, x - fx[i]);
      grid.at(i, j) = y - lower_right;
    }
  }
  return grid;
}

/// f(i/G) = largest grid y with mu((x,1] x [0,y]) <= tol.
inline double rlm_curve_of_permuton(const PermutonGrid& P, int i, double tol = 1e-9) {
  const int G = P.resolution();
  if (i < 0 || i > G) throw std::out_of_range("grid index");
  int best = 0;
  for (int j = 0; j <= G; ++j) {
    const double lower_right = P.at(G, j) - P.at(i, j);
    if (lower_right <= tol) best = j;
  }
  return static_cast<double>(best) / G;
}

inline std::vector<double> rlm_curve_of_permuton(const PermutonGrid& P, double tol = 1e-9) {
  std::vector<double> f(P.resolution() + 1);
  for (int i = 0; i <= P.resolution(); ++i) f[i] = rlm_curve_of_permuton(P, i, tol);
  return f;
}

// ---------------------------------------------------------------------------
// Weighted-curve permutons

enum class CurveKind { graph, transpose, antidiagonal };

/// Mass `weight(t) dt` carried by the point (t, g(t)), (g(t), t) or (t, 1 - t),
/// for t in [t_lo, t_hi]. g must be nondecreasing.
struct CurveComponent {
  CurveKind kind = CurveKind::graph;
  std::function<double(double)> g;
  std::function<double(double)> weight;
  double t_lo = 0.0;
  double t_hi = 1.0;
  std::vector<double> breakpoints;
};

class CurvePermuton {
public:
  static constexpr int kAnchors = 512;
  static constexpr int kSampleTable = 1 << 14;

  CurvePermuton(std::vector<CurveComponent> components, double quad_tol = 1e-8)
      : components_(std::move(components)), tol_(quad_tol) {
    anchors_.resize(components_.size());
    for (std::size_t c = 0; c < components_.size(); ++c) {
      auto& a = anchors_[c];
      a.resize(kAnchors + 1, 0.0);
      for (int k = 1; k <= kAnchors; ++k) a[k] = a[k - 1] + segment_weight(c, anchor(k - 1), anchor(k));
    }
  }

  const std::vector<CurveComponent>& components() const noexcept { return components_; }

  double component_mass(std::size_t c) const { return anchors_[c].back(); }

  double total_mass() const {
    double m = 0.0;
    for (std::size_t c = 0; c < components_.size(); ++c) m += component_mass(c);
    return m;
  }

  /// Integral of the weight of component c over [t_lo, t] by adaptive Simpson.
  double cumulative_weight(std::size_t c, double t) const {
    t = std::clamp(t, 0.0, 1.0);
    const int k = std::min(static_cast<int>(t * kAnchors), kAnchors);
    return anchors_[c][k] + segment_weight(c, anchor(k), t);
  }

  double cdf(double x, double y) const {
    double total = 0.0;
    for (std::size_t c = 0; c < components_.size(); ++c) {
      const auto& comp = components_[c];
      switch (comp.kind) {
        case CurveKind::graph:
          total += cumulative_weight(c, std::min(x, inverse(comp.g, y)));
          break;
        case CurveKind::transpose:
          total += cumulative_weight(c, std::min(inverse(comp.g, x), y));
          break;
        case CurveKind::antidiagonal:
          if (x >= 1.0 - y) total += cumulative_weight(c, x) - cumulative_weight(c, 1.0 - y);
          break;
      }
    }
    return total;
  }

  PermutonGrid to_grid(int G) const {
    return tabulate(G, [this](double x, double y) { return cdf(x, y); });
  }

  /// Inverse-CDF sampling: pick a component by mass, then t from a tabulated
  /// cumulative weight.
  std::pair<double, double> sample_point(Rng& rng) const {
    if (tables_.empty()) build_tables();
    const double u = rng.uniform() * total_mass();
    std::size_t c = 0;
    double acc = component_mass(0);
    while (u >= acc && c + 1 < components_.size()) acc += component_mass(++c);
    const auto& tab = tables_[c];
    const double v = rng.uniform() * tab.back();
    const auto it = std::upper_bound(tab.begin(), tab.end(), v);
    const int k = std::clamp(static_cast<int>(it - tab.begin()) - 1, 0, kSampleTable - 1);
    const double span = tab[k + 1] - tab[k];
    const double frac = span > 0 ? (v - tab[k]) / span : 0.5;
    const double t = (k + frac) / kSampleTable;
    const auto& comp = components_[c];
    switch (comp.kind) {
      case CurveKind::graph: return {t, comp.g(t)};
      case CurveKind::transpose: return {comp.g(t), t};
      case CurveKind::antidiagonal: return {t, 1.0 - t};
    }
    return {t, t};
  }

  /// sup{t in [0,1] : g(t) <= y} by bisection.
  static double inverse(const std::function<double(double)>& g, double y) {
    if (g(0.0) > y) return 0.0;
    if (g(1.0) <= y) return 1.0;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60 && hi - lo > 1e-16; ++it) {
      const double mid = 0.5 * (lo + hi);
      (g(mid) <= y ? lo : hi) = mid;
    }
    return lo;
  }

private:
  static double anchor(int k) { return static_cast<double>(k) / kAnchors; }

  double segment_weight(std::size_t c, double a, double b) const {
    const auto& comp = components_[c];
    a = std::max(a, comp.t_lo);
    b = std::min(b, comp.t_hi);
    if (!(b > a)) return 0.0;
    QuadratureOptions opt;
    opt.abs_tol = tol_ / kAnchors;
    return integrate(comp.weight, a, b, comp.breakpoints, opt);
  }

  void build_tables() const {
    tables_.resize(components_.size());
    for (std::size_t c = 0; c < components_.size(); ++c) {
      auto& tab = tables_[c];
      tab.resize(kSampleTable + 1);
      for (int k = 0; k <= kSampleTable; ++k) tab[k] = cumulative_weight(c, static_cast<double>(k) / kSampleTable);
    }
  }

  std::vector<CurveComponent> components_;
  double tol_;
  std::vector<std::vector<double>> anchors_;
  mutable std::vector<std::vector<double>> tables_;
};

inline CurvePermuton diagonal_permuton() {
  CurveComponent c;
  c.kind = CurveKind::graph;
  c.g = [](double t) { return t; };
  c.weight = [](double) { return 1.0; };
  return CurvePermuton({c});
}

inline CurvePermuton antidiagonal_permuton() {
  CurveComponent c;
  c.kind = CurveKind::antidiagonal;
  c.g = [](double t) { return 1.0 - t; };
  c.weight = [](double) { return 1.0; };
  return CurvePermuton({c});
}

/// Limit permuton of the tilted avoiders. For 231: the curve f carries weight
/// min(1, f') and the antidiagonal up to x* carries max(0, 1 - f'). For 321:
/// the curve and its transpose each carry rho1.
inline CurvePermuton limit_permuton(Pattern3 alpha, double beta) {
  if (!is_canonical(alpha)) throw std::invalid_argument("limit_permuton needs a canonical pattern");
  if (beta <= 0) return diagonal_permuton();
  if (alpha == Pattern3::p231) {
    const double xs = closed::x_star(beta);
    CurveComponent up;
    up.kind = CurveKind::graph;
    up.g = [beta](double t) { return closed::rlm_curve_231(beta, t); };
    up.weight = [beta](double t) { return std::min(1.0, closed::rlm_curve_231_derivative(beta, t)); };
    up.breakpoints = {xs};
    CurveComponent down;
    down.kind = CurveKind::antidiagonal;
    down.g = [](double t) { return 1.0 - t; };
    down.weight = [beta](double t) { return std::max(0.0, 1.0 - closed::rlm_curve_231_derivative(beta, t)); };
    down.t_hi = xs;
    return CurvePermuton({up, down});
  }
  CurveComponent a;
  a.kind = CurveKind::graph;
  a.g = [beta](double t) { return closed::rlm_curve_321(beta, t); };
  a.weight = [beta](double t) { return closed::density_pair_321(beta, t).first; };
  CurveComponent b = a;
  b.kind = CurveKind::transpose;
  return CurvePermuton({a, b});
}

inline double limit_rlm_curve(Pattern3 alpha, double beta, double x) {
  return canonical(alpha) == Pattern3::p231 ? closed::rlm_curve_231(beta, x) : closed::rlm_curve_321(beta, x);
}

inline double limit_excursion_231(double beta, double t) { return closed::excursion_231(beta, t); }

inline std::pair<double, double> limit_density_pair_321(double beta, double x) {
  return closed::density_pair_321(beta, x);
}

/// (rho1, rho2) as step densities holding the exact cell averages on an m-grid.
inline MeasurePairD limit_measure_pair_321(double beta, int m = 1024) {
  std::vector<double> r1(m), r2(m);
  for (int k = 0; k < m; ++k) {
    const double a = static_cast<double>(k) / m, b = static_cast<double>(k + 1) / m;
    r1[k] = std::clamp((closed::cdf1_321(beta, b) - closed::cdf1_321(beta, a)) * m, 0.0, 1.0);
    r2[k] = 1.0 - r1[k];
  }
  return MeasurePairD(StepMeasure(std::move(r1)), StepMeasure(std::move(r2)));
}

// ---------------------------------------------------------------------------
// Distances

inline double kolmogorov_distance(const StepMeasure& a, const StepMeasure& b) {
  double d = 0.0;
  for (int k = 0; k <= a.cells(); ++k) {
    const double x = static_cast<double>(k) / a.cells();
    d = std::max(d, std::abs(a.cdf(x) - b.cdf(x)));
  }
  for (int k = 0; k <= b.cells(); ++k) {
    const double x = static_cast<double>(k) / b.cells();
    d = std::max(d, std::abs(a.cdf(x) - b.cdf(x)));
  }
  return d;
}

inline double kolmogorov_distance(const MeasurePairD& a, const MeasurePairD& b) {
  return std::max(kolmogorov_distance(a.first(), b.first()), kolmogorov_distance(a.second(), b.second()));
}

/// Distance from a step measure to a continuous CDF, checked at the cell boundaries.
inline double kolmogorov_distance(const StepMeasure& a, const std::function<double(double)>& cdf) {
  double d = 0.0;
  const auto& c = a.boundary_cdf();
  for (int k = 0; k <= a.cells(); ++k) d = std::max(d, std::abs(c[k] - cdf(static_cast<double>(k) / a.cells())));
  return d;
}

/// Sup-norm between excursions, over the nodes of both grids.
inline double kolmogorov_distance(const Excursion& a, const Excursion& b) {
  double d = 0.0;
  for (int k = 0; k <= a.intervals(); ++k) {
    const double t = static_cast<double>(k) / a.intervals();
    d = std::max(d, std::abs(a.values()[k] - b(t)));
  }
  for (int k = 0; k <= b.intervals(); ++k) {
    const double t = static_cast<double>(k) / b.intervals();
    d = std::max(d, std::abs(a(t) - b.values()[k]));
  }
  return d;
}

inline double kolmogorov_distance(const PermutonGrid& a, const PermutonGrid& b) {
  if (a.resolution() != b.resolution()) throw std::invalid_argument("grid resolutions differ");
  double d = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) d = std::max(d, std::abs(a.data()[k] - b.data()[k]));
  return d;
}

// ---------------------------------------------------------------------------
// Pattern densities

struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

/// Monte Carlo density of `pattern` (one-line notation, any length) in a
/// permuton with a sample_point(Rng&) method: draw k points, sort by x, test
/// whether the y-order matches.
template <class Permuton>
Estimate pattern_density_mc(std::span<const int> pattern, const Permuton& mu, std::uint64_t samples, Rng& rng) {
  if (samples == 0) throw std::invalid_argument("need at least one sample");
  const std::size_t k = pattern.size();
  std::vector<std::pair<double, double>> pts(k);
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (auto& p : pts) p = mu.sample_point(rng);
    std::sort(pts.begin(), pts.end());
    bool match = true;
    for (std::size_t a = 0; a < k && match; ++a)
      for (std::size_t b = a + 1; b < k && match; ++b) match = (pattern[a] < pattern[b]) == (pts[a].second < pts[b].second);
    hits += match;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

template <class Permuton>
Estimate pattern_density_mc(Pattern3 alpha, const Permuton& mu, std::uint64_t samples, Rng& rng) {
  const auto w = pattern_word(alpha);
  return pattern_density_mc(std::span<const int>(w), mu, samples, rng);
}

}  // namespace mallows
