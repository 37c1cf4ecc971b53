// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
// `acceptance 3 8` runs only criteria 3 and 8.
//
// Reference values are recomputed here by brute force or straight from the
// closed-form expressions, not through the library's fast paths.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "../unit/support.hpp"
#include "mallows/mallows.hpp"

using namespace mallows;
using testing_support::all_permutations;
using testing_support::naive_avoids;
using testing_support::naive_inversions;
using testing_support::word;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
  void note(const std::string& s) {
    if (pass) detail += (detail.empty() ? "" : "; ") + s;
  }
};

std::string fmt(double x, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << x;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

constexpr Pattern3 k231 = Pattern3::p231;
constexpr Pattern3 k321 = Pattern3::p321;

// ---------------------------------------------------------------------------
// Closed forms written out directly, for moderate beta.

double f231(double b, double x) { return 1.0 - std::log(1.0 + std::exp(b) - std::exp(b * x)) / b; }

double f321(double b, double x) {
  return 0.5 + std::log((std::exp(b * x) + std::exp(b / 2)) / (1.0 + std::exp(b / 2) + std::exp(b) - std::exp(b * x))) / b;
}

double phi231(double b, double t) { return std::log((1.0 + std::exp(b)) / (1.0 + std::exp(b * (1.0 - 2.0 * t)))) / b - t; }

double rho1(double b, double x) { return 1.0 / (1.0 + std::exp(b * (0.5 - x))); }

double xstar(double b) { return (std::log(1.0 + std::exp(b)) - std::log(2.0)) / b; }

// Composite Simpson with 2k panels.
double simpson(const std::function<double(double)>& g, double a, double b, int k = 20000) {
  const double h = (b - a) / (2 * k);
  double s = g(a) + g(b);
  for (int i = 1; i < 2 * k; ++i) s += g(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Limits of (1/n) log Z_n as stated: y-integrals over [e^-b, e^b] and
// [e^-b/2, e^b/2], evaluated in the variable s = log y.
double stated_limit(Pattern3 a, double b) {
  auto in_log = [](const std::function<double(double)>& g) {
    return [g](double s) { return g(std::exp(s)) * std::exp(s); };
  };
  if (a == k231) {
    return 2.0 * std::log1p(std::exp(b)) - b -
           simpson(in_log([](double y) { return std::log(y) / (1.0 + y); }), -b, b) / b;
  }
  return 2.0 / b * simpson(in_log([](double y) { return std::log1p(y) / y; }), -b / 2, b / 2);
}

// Five-point central difference.
double derivative(const std::function<double(double)>& f, double x, double h = 1e-6) {
  return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}

// ---------------------------------------------------------------------------
// Brute-force combinatorics

std::vector<std::vector<int>> dyck_words(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> h{0};
  std::function<void(int, int)> rec = [&](int ups, int downs) {
    if (ups == n && downs == n) {
      out.push_back(h);
      return;
    }
    const int cur = h.back();
    if (ups < n) {
      h.push_back(cur + 1);
      rec(ups + 1, downs);
      h.pop_back();
    }
    if (downs < ups) {
      h.push_back(cur - 1);
      rec(ups, downs + 1);
      h.pop_back();
    }
  };
  rec(0, 0);
  return out;
}

std::vector<int> vals(const Permutation& p) { return {p.values().begin(), p.values().end()}; }

// Right-to-left minima as (position, value), left to right.
std::vector<std::pair<int, int>> rl_minima(const Permutation& p) {
  std::vector<std::pair<int, int>> out;
  for (int a = 1; a <= p.size(); ++a) {
    bool m = true;
    for (int c = a + 1; c <= p.size() && m; ++c) m = p.value(a) < p.value(c);
    if (m) out.push_back({a, p.value(a)});
  }
  return out;
}

std::vector<int> naive_staircase(const Permutation& p) {
  const int n = p.size();
  std::vector<int> f(n);
  for (int x = 0; x < n; ++x) {
    int m = n + 1;
    for (int c = x + 1; c <= n; ++c) m = std::min(m, p.value(c));
    f[x] = m - 1;
  }
  return f;
}

// Coefficients of the inversion polynomial by filtering S_n.
std::vector<std::uint64_t> brute_poly(Pattern3 a, int n) {
  std::vector<std::uint64_t> c(n * (n - 1) / 2 + 1, 0);
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), 1);
  const auto w = word(a);
  do {
    const Permutation p(v, Permutation::unchecked{});
    if (naive_avoids(w, p)) ++c[naive_inversions(p)];
  } while (std::next_permutation(v.begin(), v.end()));
  while (c.size() > 1 && c.back() == 0) c.pop_back();
  return c;
}

// Reflected uniform bridge: a random nonnegative 1-Lipschitz excursion with 2n steps.
std::vector<int> random_reflected_bridge(int n, std::mt19937_64& g) {
  std::vector<int> s(2 * n);
  for (int k = 0; k < 2 * n; ++k) s[k] = k < n ? 1 : -1;
  std::shuffle(s.begin(), s.end(), g);
  std::vector<int> h(2 * n + 1, 0);
  int w = 0;
  for (int k = 0; k < 2 * n; ++k) {
    w += s[k];
    h[k + 1] = std::abs(w);
  }
  return h;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::uint64_t chain_steps(int n) { return static_cast<std::uint64_t>(1.2 * n * double(n) * n); }

Permutation equilibrated_sample(Pattern3 a, int n, double beta, std::uint64_t seed) {
  RunConfig cfg;
  cfg.pattern = a;
  cfg.n = n;
  cfg.beta = beta;
  cfg.steps = std::max<std::uint64_t>(chain_steps(n), 20'000'000);
  cfg.seed = seed;
  cfg.init = InitKind::alternating;
  return run_chain(cfg).final_permutation;
}

double excursion_error(const Permutation& p, double beta) {
  const Excursion lim = Excursion::sample([beta](double t) { return beta > 0 ? phi231(beta, t) : 0.0; }, 8192);
  return kolmogorov_distance(empirical_excursion(p), lim);
}

double pair_error(const Permutation& p, const std::function<double(double)>& F1,
                  const std::function<double(double)>& F2) {
  const MeasurePairD e = empirical_measure_pair(p);
  return std::max(kolmogorov_distance(e.first(), F1), kolmogorov_distance(e.second(), F2));
}

double cdf1_direct(double b, double x) { return (std::log1p(std::exp(b * (x - 0.5))) - std::log1p(std::exp(-0.5 * b))) / b; }

// ---------------------------------------------------------------------------
// Criteria

Outcome c01_catalan() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::size_t> catalan{1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796};
  for (Pattern3 a : {k231, k321})
    for (int n = 1; n <= 10; ++n) {
      const auto got = enumerate_avoiders(a, n).size();
      o.require(got == catalan[n - 1], to_string(a) + " n=" + std::to_string(n) + " gave " + std::to_string(got));
    }
  const double t = seconds_since(t0);
  o.require(t < 30.0, "took " + fmt(t) + " s");
  o.note(fmt(t, 3) + " s");
  return o;
}

Outcome c02_bijections() {
  Outcome o;
  std::size_t checked = 0;
  for (Pattern3 a : {k231, k321})
    for (int n = 1; n <= 8; ++n) {
      std::set<std::vector<int>> images;
      for (const auto& h : dyck_words(n)) {
        const DyckPath d = DyckPath::from_heights(h);
        const Permutation p = dyck_to_perm(a, d);
        o.require(naive_avoids(word(a), p), "decoded permutation contains the pattern");
        o.require(perm_to_dyck(a, p).heights() == h, "path round trip failed at n=" + std::to_string(n));
        images.insert(vals(p));
      }
      std::size_t avoiders = 0;
      for (const auto& p : all_permutations(n)) {
        if (!naive_avoids(word(a), p)) continue;
        ++avoiders;
        ++checked;
        o.require(dyck_to_perm(a, perm_to_dyck(a, p)) == p, to_string(a) + " round trip failed on " + format_permutation(p));
        o.require(images.count(vals(p)) == 1, "avoider missing from the image");
      }
      o.require(avoiders == images.size(), "image size differs from the number of avoiders");
    }
  o.note(std::to_string(checked) + " avoiders");
  return o;
}

Outcome c03_inversion_formulas() {
  Outcome o;
  std::size_t checked = 0;
  for (int n = 1; n <= 8; ++n)
    for (const auto& p : all_permutations(n)) {
      const auto inv = naive_inversions(p);
      if (naive_avoids(word(k321), p)) {
        std::int64_t s = 0;
        for (auto [a, b] : rl_minima(p)) s += a - b;
        o.require(s == inv, "RL-minima sum fails on " + format_permutation(p));
        o.require(inversions(p) == inv, "inversions() fails on " + format_permutation(p));
        o.require(inv_from_dyck(k321, perm_to_dyck_321(p)) == inv, "321 path formula fails on " + format_permutation(p));
        ++checked;
      }
      if (naive_avoids(word(k231), p)) {
        const auto F = naive_staircase(p);
        const std::int64_t s = std::accumulate(F.begin(), F.end(), std::int64_t{0});
        o.require(std::int64_t(n) * (n - 1) / 2 - s == inv, "staircase formula fails on " + format_permutation(p));
        // same identity through the excursion: inv = -n/2 + 2 n^2 * integral of phi
        const auto h = perm_to_dyck_231(p).heights();
        const std::int64_t area2 = std::accumulate(h.begin(), h.end(), std::int64_t{0});  // = 2n * 2n * integral
        o.require(area2 - n == 2 * inv, "excursion-area formula fails on " + format_permutation(p));
        o.require(inversions(p) == inv, "inversions() fails on " + format_permutation(p));
        o.require(inv_from_dyck(k231, perm_to_dyck_231(p)) == inv, "231 path formula fails on " + format_permutation(p));
        ++checked;
      }
    }
  o.note(std::to_string(checked) + " avoiders");
  return o;
}

Outcome c04_delta_rule() {
  Outcome o;
  std::size_t cases = 0;
  for (Pattern3 a : {k231, k321})
    for (int n = 1; n <= 8; ++n)
      for (const auto& h : dyck_words(n)) {
        const DyckPath d = DyckPath::from_heights(h);
        const auto inv0 = naive_inversions(dyck_to_perm(a, d));
        for (int i = 1; i < 2 * n; ++i) {
          const DyckPath e = flip(d, i);
          const auto diff = naive_inversions(dyck_to_perm(a, e)) - inv0;
          ++cases;
          o.require(delta_inv(a, d, i) == diff, to_string(a) + " delta wrong at i=" + std::to_string(i));
          if (a == k231 && e.heights() != d.heights()) o.require(std::abs(diff) == 1, "231 acting flip with |delta| != 1");
          if (a == k231 && e.heights() != d.heights()) {
            const bool valley_to_peak = e.height(i) > d.height(i);
            o.require(diff == (valley_to_peak ? 1 : -1), "231 delta sign does not follow valley/peak");
          }
        }
      }
  o.note(std::to_string(cases) + " (path, index) pairs");
  return o;
}

Outcome c05_partition_exactness() {
  Outcome o;
  o.require(partition_poly(k231, 3).to_string() == "1 + 2q + q^2 + q^3", "231 n=3: " + partition_poly(k231, 3).to_string());
  o.require(partition_poly(k321, 3).to_string() == "1 + 2q + 2q^2", "321 n=3: " + partition_poly(k321, 3).to_string());

  for (Pattern3 a : all_patterns)
    for (int n = 1; n <= 10; ++n) {
      const auto want = brute_poly(a, n);
      const auto got = partition_poly(a, n).coeffs;
      bool same = got.size() == want.size();
      for (std::size_t k = 0; same && k < got.size(); ++k) same = got[k] == want[k];
      o.require(same, to_string(a) + " polynomial differs from brute force at n=" + std::to_string(n));
    }

  // Z_{n+1} = sum_i q^i Z_i Z_{n-i} as polynomials
  std::vector<std::vector<BigInt>> P{{1}};
  for (int n = 1; n <= 21; ++n) P.push_back(partition_poly(k231, n).coeffs);
  for (int n = 0; n < 20; ++n) {
    std::vector<BigInt> rhs(n * (n + 1) / 2 + 1, 0);
    for (int i = 0; i <= n; ++i)
      for (std::size_t u = 0; u < P[i].size(); ++u)
        for (std::size_t v = 0; v < P[n - i].size(); ++v) rhs[i + u + v] += P[i][u] * P[n - i][v];
    o.require(rhs == P[n + 1], "recurrence fails at n+1=" + std::to_string(n + 1));
  }

  double worst = 0.0;
  for (Pattern3 a : {k231, k321, Pattern3::p123, Pattern3::p312}) {
    const double exact = partition_poly(a, 50).log_z_over_n(1.0).convert_to<double>();
    const double dp = partition_log(a, 50, 1.0);
    worst = std::max(worst, std::abs(dp - exact) / std::abs(exact));
  }
  o.require(worst < 1e-9, "log-space DP relative error " + fmt(worst));
  o.note("DP vs exact rel err " + fmt(worst, 2));
  return o;
}

Outcome c06_partition_limits() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  for (Pattern3 a : {k231, k321}) {
    const double d = std::abs(partition_limit(a, 1e-4) - std::log(4.0));
    o.require(d < 1e-3, to_string(a) + " limit at beta=1e-4 off log 4 by " + fmt(d));
    for (double b : {0.5, 2.0, 5.0}) {
      const double e = std::abs(partition_limit(a, b) - stated_limit(a, b));
      o.require(e < 1e-8, to_string(a) + " limit differs from the stated integral by " + fmt(e));
    }
    const auto t = partition_convergence(a, 2.0, {512, 1024, 2048, 4096});
    o.require(t.residuals_strictly_decreasing(), to_string(a) + " residuals not strictly decreasing");
    o.require(t.rows.back().residual < 0.05, to_string(a) + " residual at 4096 is " + fmt(t.rows.back().residual));
    o.note(to_string(a) + " residual(4096)=" + fmt(t.rows.back().residual, 3));
  }
  const double s = seconds_since(t0);
  o.require(s < 120.0, "took " + fmt(s) + " s");
  o.note(fmt(s, 3) + " s");
  return o;
}

Outcome c07_cross_identity() {
  Outcome o;
  double worst = 0.0;
  for (Pattern3 a : {k231, k321})
    for (double b : {0.5, 1.0, 2.0, 5.0}) {
      const double lhs = partition_limit(a, b) - std::log(4.0);
      double act;
      if (a == k231) {
        act = action_231(b, [b](double t) { return phi231(b, t); },
                         [b](double t) { return std::tanh(0.5 * b * (1.0 - 2.0 * t)); });
      } else {
        act = action_321(b, [b](double x) { return rho1(b, x); }, [b](double x) { return 1.0 - rho1(b, x); });
      }
      worst = std::max(worst, std::abs(lhs + act));
      worst = std::max(worst, std::abs(lhs + minimal_action(a, b)));
    }
  o.require(worst < 1e-6, "largest mismatch " + fmt(worst));
  o.note("largest mismatch " + fmt(worst, 2));
  return o;
}

Outcome c08_stationarity() {
  Outcome o;
  const int n = 6;
  const double beta = 2.0;
  for (Pattern3 a : {k231, k321}) {
    // exact law by brute force over S_6
    std::map<std::vector<int>, double> exact;
    double z = 0.0;
    for (const auto& p : all_permutations(n))
      if (naive_avoids(word(a), p)) z += exact[vals(p)] = std::exp(beta / n * naive_inversions(p));
    for (auto& [k, v] : exact) v /= z;

    std::map<std::vector<int>, double> seen;
    std::uint64_t count = 0;
    RunConfig cfg;
    cfg.pattern = a;
    cfg.n = n;
    cfg.beta = beta;
    cfg.steps = 1'000'000;
    cfg.thin = 50;
    cfg.seed = 20240601;
    run_chain(cfg, [&](std::uint64_t, const Permutation& p) {
      seen[vals(p)] += 1.0;
      ++count;
    });
    double tv = 0.0;
    for (const auto& [k, v] : exact) {
      const auto it = seen.find(k);
      tv += std::abs(v - (it == seen.end() ? 0.0 : it->second / count));
    }
    for (const auto& [k, v] : seen) o.require(exact.count(k), "chain left the avoiders");
    tv *= 0.5;
    // expected TV of the same number of independent exact draws
    double floor = 0.0;
    for (const auto& [k, v] : exact) floor += 0.5 * std::sqrt(2.0 * v * (1.0 - v) / (M_PI * double(count)));
    o.require(tv < 0.02, to_string(a) + " TV " + fmt(tv) + " over " + std::to_string(count) +
                             " samples; independent exact draws would give about " + fmt(floor));
    o.note(to_string(a) + " TV=" + fmt(tv, 3) + " (iid floor " + fmt(floor, 3) + ")");
  }

  // detailed balance over all ordered pairs related by one flip, n <= 6
  double worst = 0.0;
  for (Pattern3 a : {k231, k321})
    for (int m = 1; m <= 6; ++m)
      for (const auto& h : dyck_words(m)) {
        const DyckPath d = DyckPath::from_heights(h);
        const ChainState s(a, m, beta, d);
        const double lq = beta / m;
        const auto inv_d = naive_inversions(dyck_to_perm(a, d));
        for (int i = 1; i < 2 * m; ++i) {
          const DyckPath e = flip(d, i);
          if (e.heights() == d.heights()) {
            o.require(s.move_probability(i) == 0.0, "inert index with positive move probability");
            continue;
          }
          const ChainState t(a, m, beta, e);
          const auto inv_e = naive_inversions(dyck_to_perm(a, e));
          const double p_de = s.move_probability(i), p_ed = t.move_probability(i);
          const double want = std::min(1.0, std::exp(lq * double(inv_e - inv_d))) / (2 * m - 1);
          o.require(std::abs(p_de - want) <= 1e-15, "one-step kernel differs from min(1, q^delta)/(2n-1)");
          const double l = std::exp(lq * double(inv_d)) * p_de, r = std::exp(lq * double(inv_e)) * p_ed;
          worst = std::max(worst, std::abs(l - r) / std::max(l, r));
        }
      }
  o.require(worst < 1e-12, "detailed balance relative defect " + fmt(worst));
  return o;
}

Outcome c09_shape_231() {
  Outcome o;
  const double beta = 3.0;
  std::vector<double> small(10), large(10);
  parallel_for(20, [&](std::size_t k) {
    const int n = k < 10 ? 100 : 800;
    const auto p = equilibrated_sample(k231, n, beta, 1000 + k % 10);
    (k < 10 ? small : large)[k % 10] = excursion_error(p, beta);
  });
  const double m100 = median(small), m800 = median(large);
  o.require(m800 < m100, "median at 800 (" + fmt(m800) + ") not below median at 100 (" + fmt(m100) + ")");
  o.require(m800 < 0.08, "median at 800 is " + fmt(m800));
  o.note("median sup error n=100: " + fmt(m100, 3) + ", n=800: " + fmt(m800, 3));
  return o;
}

Outcome c10_shape_321() {
  Outcome o;
  const double beta = 3.0;
  auto F1 = [beta](double x) { return cdf1_direct(beta, x); };
  auto F2 = [beta](double x) { return x - cdf1_direct(beta, x); };
  std::vector<double> small(10), large(10);
  parallel_for(20, [&](std::size_t k) {
    const int n = k < 10 ? 100 : 800;
    const auto p = equilibrated_sample(k321, n, beta, 2000 + k % 10);
    (k < 10 ? small : large)[k % 10] = pair_error(p, F1, F2);
  });
  const double m100 = median(small), m800 = median(large);
  o.require(m800 < m100, "median at 800 (" + fmt(m800) + ") not below median at 100 (" + fmt(m100) + ")");
  o.require(m800 < 0.08, "median at 800 is " + fmt(m800));
  o.note("median Kolmogorov error n=100: " + fmt(m100, 3) + ", n=800: " + fmt(m800, 3));
  return o;
}

Outcome c11_diagonal() {
  Outcome o;
  const int n = 800;
  std::vector<double> d(2);
  parallel_for(2, [&](std::size_t k) {
    if (k == 0) {
      d[0] = empirical_excursion(equilibrated_sample(k231, n, -2.0, 31)).sup_norm();
    } else {
      d[1] = pair_error(equilibrated_sample(k321, n, -2.0, 32), [](double x) { return 0.5 * x; },
                        [](double x) { return 0.5 * x; });
    }
  });
  o.require(d[0] < 0.05, "231 sup excursion " + fmt(d[0]));
  o.require(d[1] < 0.08, "321 pair distance to (1/2,1/2) " + fmt(d[1]));
  o.note("231 sup phi=" + fmt(d[0], 3) + ", 321 pair distance=" + fmt(d[1], 3));
  return o;
}

Outcome c12_analytic() {
  Outcome o;
  const double tol = 1e-10;
  for (double b : {0.5, 1.0, 3.0, 6.0, 12.0}) {
    for (Pattern3 a : {k231, k321}) {
      o.require(std::abs(limit_rlm_curve(a, b, 0.0)) < tol, "f(0) != 0");
      o.require(std::abs(limit_rlm_curve(a, b, 1.0) - 1.0) < tol, "f(1) != 1");
    }
    const double xs = closed::x_star(b);
    o.require(std::abs(xs - xstar(b)) < tol, "x* differs from the stated value");
    o.require(std::abs(closed::rlm_curve_231(b, xs) - (1.0 - xs)) < tol, "f(x*) != 1 - x*");
    auto c231 = [b](double x) { return closed::rlm_curve_231(b, x); };
    auto c321 = [b](double x) { return closed::rlm_curve_321(b, x); };
    const double fd = derivative(c231, xs);
    o.require(std::abs(fd - 1.0) < 1e-6, "f'(x*) = " + fmt(fd, 12));
    o.require(std::abs(closed::cdf1_321(b, 1.0) - 0.5) < tol, "rho1 mass != 1/2");
    o.require(std::abs(closed::cdf2_321(b, 1.0) - 0.5) < tol, "rho2 mass != 1/2");
    for (int k = 0; k <= 1000; ++k) {
      const double x = k / 1000.0;
      o.require(std::abs(limit_excursion_231(b, x) - limit_excursion_231(b, 1.0 - x)) < tol, "phi not symmetric");
      o.require(std::abs(limit_excursion_231(b, x) - phi231(b, x)) < tol, "phi differs from the stated formula");
      o.require(std::abs(closed::rlm_curve_231(b, x) - f231(b, x)) < tol, "231 curve differs from the stated formula");
      o.require(std::abs(closed::rlm_curve_321(b, x) - f321(b, x)) < tol, "321 curve differs from the stated formula");
      const auto [r1, r2] = limit_density_pair_321(b, x);
      o.require(std::abs(r1 + r2 - 1.0) < tol, "rho1 + rho2 != 1");
      o.require(std::abs(r1 - rho1(b, x)) < tol, "rho1 differs from the stated formula");
      o.require(std::abs(closed::rlm_curve_231(b, 1.0 - closed::rlm_curve_231(b, x)) - (1.0 - x)) < tol,
                "f(1 - f(x)) != 1 - x at beta=" + fmt(b) + " x=" + fmt(x));
      if (k > 0 && k < 1000) {
        const double fx = closed::rlm_curve_321(b, x);
        const double rhs = derivative(c321, x) * limit_density_pair_321(b, fx).second;
        o.require(std::abs(r1 - rhs) < 1e-6, "rho1(x) != f'(x) rho2(f(x)) at x=" + fmt(x));
      }
    }
  }
  o.note("beta in {0.5, 1, 3, 6, 12}");
  return o;
}

Outcome c13_permutons() {
  Outcome o;
  const int G = 256;
  double worst_psi = 0.0, worst_rlm = 0.0;
  for (double b : {1.0, 3.0, 6.0}) {
    const PermutonGrid lim321 = limit_permuton(k321, b).to_grid(G);
    const double d1 = kolmogorov_distance(psi(minimizer_321(b), G), lim321);
    worst_psi = std::max(worst_psi, d1);
    o.require(d1 <= 2.0 / G, "Psi(minimizer) vs limit at beta=" + fmt(b) + ": " + fmt(d1));

    const PermutonGrid Pf = permuton_from_rlm(RlmCurve::from_function([b](double x) { return f231(b, x); }, 4096), G);
    const double d2 = kolmogorov_distance(Pf, limit_permuton(k231, b).to_grid(G));
    worst_rlm = std::max(worst_rlm, d2);
    o.require(d2 <= 2.0 / G, "P_f vs limit at beta=" + fmt(b) + ": " + fmt(d2));

    // every grid cell, hence every grid rectangle, has nonnegative mass; uniform marginals
    for (int i = 1; i <= G; ++i)
      for (int j = 1; j <= G; ++j) {
        const double cell = Pf.at(i, j) - Pf.at(i - 1, j) - Pf.at(i, j - 1) + Pf.at(i - 1, j - 1);
        o.require(cell >= -1e-12, "negative cell mass " + fmt(cell));
      }
    for (int i = 0; i <= G; ++i) {
      o.require(std::abs(Pf.at(i, G) - double(i) / G) < 1e-9, "first marginal not uniform");
      o.require(std::abs(Pf.at(G, i) - double(i) / G) < 1e-9, "second marginal not uniform");
    }
  }
  // literal check of all rectangles on a coarser grid
  {
    const int g = 48;
    const PermutonGrid P = permuton_from_rlm(RlmCurve::from_function([](double x) { return f231(3.0, x); }, 4096), g);
    double least = 1.0;
    for (int i1 = 0; i1 < g; ++i1)
      for (int i2 = i1 + 1; i2 <= g; ++i2)
        for (int j1 = 0; j1 < g; ++j1)
          for (int j2 = j1 + 1; j2 <= g; ++j2)
            least = std::min(least, P.at(i2, j2) - P.at(i1, j2) - P.at(i2, j1) + P.at(i1, j1));
    o.require(least >= -1e-12, "rectangle inequality fails: " + fmt(least));
  }
  Rng rng = derive_rng(7, 0);
  for (Pattern3 a : {k231, k321}) {
    const auto est = pattern_density_mc(a, limit_permuton(a, 3.0), 1'000'000, rng);
    o.require(std::abs(est.value) <= 3.0 * est.stderr_, to_string(a) + " density " + fmt(est.value));
    o.note(to_string(a) + " density " + fmt(est.value, 2));
  }
  o.note("Psi err " + fmt(worst_psi, 2) + ", P_f err " + fmt(worst_rlm, 2));
  return o;
}

Outcome c14_convexity() {
  Outcome o;
  const int n = 512, m = 2 * n;
  std::mt19937_64 g(99);
  std::uniform_real_distribution<double> U(0.05, 1.0);
  for (double b : {1.0, 3.0}) {
    const Excursion phi = minimizer_231(b, m);
    const double a0 = action_231(b, phi);
    for (int r = 0; r < 20; ++r) {
      const auto h = random_reflected_bridge(n, g);
      const double s = U(g);
      std::vector<double> v(m + 1);
      for (int k = 0; k <= m; ++k) v[k] = (1.0 - s) * phi.values()[k] + s * h[k] / double(m);
      const double a1 = action_231(b, Excursion(v, 1e-9));
      o.require(a1 > a0, "231 perturbation does not increase the action at beta=" + fmt(b));
    }
    const MeasurePairD pair = minimizer_321(b, n);
    const double p0 = action_321(b, pair);
    for (int r = 0; r < 20; ++r) {
      MeasurePairD other;
      if (r == 0) {
        other = MeasurePairD(StepMeasure::uniform(n, 0.5), StepMeasure::uniform(n, 0.5));
      } else {
        const auto h = random_reflected_bridge(n, g);
        other = empirical_measure_pair(dyck_to_perm_321(DyckPath::from_heights(h)));
      }
      const double s = r == 0 ? 1.0 : U(g);
      std::vector<double> r1(n), r2(n);
      for (int k = 0; k < n; ++k) {
        r1[k] = (1.0 - s) * pair.first().density()[k] + s * other.first().density()[k];
        r2[k] = (1.0 - s) * pair.second().density()[k] + s * other.second().density()[k];
      }
      const double p1 = action_321(b, MeasurePairD(StepMeasure(r1), StepMeasure(r2)));
      o.require(p1 > p0, "321 perturbation does not increase the action at beta=" + fmt(b));
    }
  }
  double spread = 0.0;
  for (double b : {0.5, 1.0, 2.0, 5.0}) {
    double lo = 1e300, hi = -1e300;
    for (int k = 1; k < 1000; ++k) {
      const double t = k / 1000.0;
      const double c = rate_J_derivative(closed::excursion_231_derivative(b, t)) + b * t;
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    spread = std::max(spread, hi - lo);
  }
  o.require(spread < 1e-8, "J'(phi') + beta t varies by " + fmt(spread));
  o.note("first-order spread " + fmt(spread, 2));
  return o;
}

Outcome c15_ball_ordering() {
  Outcome o;
  const int n = 12;
  const double pz = exact_ball_probability(k231, n, 0.0, Excursion::zero(2 * n), 0.15);
  const double pt = exact_ball_probability(k231, n, 0.0, Excursion::tent(2 * n), 0.15);
  // the same two probabilities by direct enumeration of Dyck paths
  std::uint64_t in_zero = 0, in_tent = 0, total = 0;
  for (const auto& h : dyck_words(n)) {
    double dz = 0.0, dt = 0.0;
    for (int k = 0; k <= 2 * n; ++k) {
      dz = std::max(dz, h[k] / (2.0 * n));
      dt = std::max(dt, std::abs(h[k] / (2.0 * n) - std::min(k, 2 * n - k) / (2.0 * n)));
    }
    in_zero += dz <= 0.15;
    in_tent += dt <= 0.15;
    ++total;
  }
  o.require(std::abs(pz - double(in_zero) / total) < 1e-12, "zero-ball probability differs from enumeration");
  o.require(std::abs(pt - double(in_tent) / total) < 1e-12, "tent-ball probability differs from enumeration");
  o.require(pz > pt, "ball around 0 not more likely: " + fmt(pz) + " vs " + fmt(pt));
  o.note("P(zero ball)=" + fmt(pz, 4) + ", P(tent ball)=" + fmt(pt, 4));
  return o;
}

#ifndef MALLOWS_AVOID_EXE
#define MALLOWS_AVOID_EXE "mallows_avoid"
#endif

int shell(const std::string& cmd) {
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

Outcome c16_performance() {
  Outcome o;
  const auto dir = std::filesystem::temp_directory_path() / "mallows_avoid_acceptance";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const std::string exe = std::string("'") + MALLOWS_AVOID_EXE + "'";
  const std::string quiet = " >/dev/null 2>&1";
  const auto t0 = std::chrono::steady_clock::now();
  const int rc = shell("cd '" + dir.string() + "' && " + exe +
                       " sample --pattern 231 --n 600 --beta 3 --steps 300000000 --seed 1 --init alt --out run.csv" + quiet);
  const double t = seconds_since(t0);
  o.require(rc == 0, "sample exited with " + std::to_string(rc));
  o.require(t < 300.0, "3e8 steps took " + fmt(t) + " s");
  const int rc2 = shell("cd '" + dir.string() + "' && " + exe + " sample --config run.meta.json --out again.csv" + quiet);
  o.require(rc2 == 0, "rerun exited with " + std::to_string(rc2));
  const std::string a = slurp(dir / "run.csv"), b = slurp(dir / "again.csv");
  o.require(!a.empty() && a == b, "rerun from metadata is not byte-identical");
  o.note("3e8 steps at n=600 in " + fmt(t, 3) + " s");
  return o;
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "Catalan counts", c01_catalan},
    {2, "bijection round trips", c02_bijections},
    {3, "inversion formulas", c03_inversion_formulas},
    {4, "delta rule", c04_delta_rule},
    {5, "partition exactness", c05_partition_exactness},
    {6, "partition limits", c06_partition_limits},
    {7, "cross identity", c07_cross_identity},
    {8, "MCMC stationarity", c08_stationarity},
    {9, "231 limit shape", c09_shape_231},
    {10, "321 limit shape", c10_shape_321},
    {11, "diagonal limit for beta<=0", c11_diagonal},
    {12, "analytic identities", c12_analytic},
    {13, "permuton machinery", c13_permutons},
    {14, "convexity and optimality", c14_convexity},
    {15, "ball ordering", c15_ball_ordering},
    {16, "performance and determinism", c16_performance},
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int k = 1; k < argc; ++k) only.insert(std::atoi(argv[k]));
  int failed = 0;
  for (const auto& c : kCriteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    failed += !r.pass;
    std::printf("%s %2d %-30s %s (%.1f s)\n", r.pass ? "PASS" : "FAIL", c.id, c.name, r.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
