#pragma once

// Exhaustive small-n ground truth: avoider enumeration, exact tilted laws,
// exact ball probabilities, and the cross-module validation suites.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "mallows/core.hpp"
#include "mallows/dyck.hpp"
#include "mallows/permuton.hpp"
#include "mallows/sampler.hpp"
#include "mallows/theory.hpp"

namespace mallows {

inline constexpr int kMaxEnumerationN = 14;

/// Visits every alpha-avoider of size n, decoded from Dyck paths in
/// lexicographic order of their words (D before U).
inline void for_each_avoider(Pattern3 alpha, int n, const std::function<void(const Permutation&)>& visit) {
  if (n < 0) throw std::invalid_argument("negative size");
  if (n > kMaxEnumerationN) throw std::out_of_range("enumeration is capped at n = 14");
  if (n == 0) {
    visit(Permutation(std::vector<int>{}));
    return;
  }
  const Pattern3 c = canonical(alpha);
  for_each_dyck(n, [&](const std::vector<int>& h) {
    visit(symmetry_apply(alpha, dyck_to_perm(c, DyckPath::from_heights(h))));
  });
}

inline std::vector<Permutation> enumerate_avoiders(Pattern3 alpha, int n) {
  std::vector<Permutation> out;
  for_each_avoider(alpha, n, [&](const Permutation& p) { out.push_back(p); });
  return out;
}

struct ExactDistribution {
  Pattern3 pattern = Pattern3::p231;
  int n = 0;
  double beta = 0.0;
  std::vector<Permutation> support;
  std::vector<double> probabilities;

  double expected_inversions() const {
    double e = 0.0;
    for (std::size_t k = 0; k < support.size(); ++k) e += probabilities[k] * static_cast<double>(inversions(support[k]));
    return e;
  }

  double probability_of(const Permutation& p) const {
    for (std::size_t k = 0; k < support.size(); ++k)
      if (support[k] == p) return probabilities[k];
    return 0.0;
  }
};

/// Weights e^{(beta/n) inv} normalized by log-sum-exp.
inline ExactDistribution exact_tilted(Pattern3 alpha, int n, double beta) {
  ExactDistribution d{alpha, n, beta, enumerate_avoiders(alpha, n), {}};
  const double lq = n > 0 ? beta / n : 0.0;
  std::vector<double> logw(d.support.size());
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < logw.size(); ++k) {
    logw[k] = lq * static_cast<double>(inversions(d.support[k]));
    mx = std::max(mx, logw[k]);
  }
  double z = 0.0;
  for (double w : logw) z += std::exp(w - mx);
  d.probabilities.resize(logw.size());
  for (std::size_t k = 0; k < logw.size(); ++k) d.probabilities[k] = std::exp(logw[k] - mx) / z;
  return d;
}

/// sup over t = k/2n of |phi_sigma(t) - center(t)|, the ball metric for 231.
inline double excursion_sup_distance(const DyckPath& d, const Excursion& center) {
  const double len = d.length();
  double m = 0.0;
  for (int k = 0; k <= d.length(); ++k) m = std::max(m, std::abs(d.height(k) / len - center(k / len)));
  return m;
}

/// P(phi_sigma within eps of center) under the tilted 231 law.
inline double exact_ball_probability(Pattern3 alpha, int n, double beta, const Excursion& center, double eps) {
  if (alpha != Pattern3::p231) throw std::invalid_argument("excursion balls are defined for 231");
  const auto law = exact_tilted(alpha, n, beta);
  double p = 0.0;
  for (std::size_t k = 0; k < law.support.size(); ++k) {
    if (excursion_sup_distance(perm_to_dyck_231(law.support[k]), center) <= eps) p += law.probabilities[k];
  }
  return std::min(p, 1.0);
}

/// P(measure pair of sigma within eps of center, pair Kolmogorov) under the tilted 321 law.
inline double exact_ball_probability(Pattern3 alpha, int n, double beta, const MeasurePairD& center, double eps) {
  if (alpha != Pattern3::p321) throw std::invalid_argument("measure-pair balls are defined for 321");
  const auto law = exact_tilted(alpha, n, beta);
  double p = 0.0;
  for (std::size_t k = 0; k < law.support.size(); ++k) {
    if (kolmogorov_distance(empirical_measure_pair(law.support[k]), center) <= eps) p += law.probabilities[k];
  }
  return std::min(p, 1.0);
}

// ---------------------------------------------------------------------------
// Validation suites

struct SuiteResult {
  std::string suite;
  int n = 0;
  std::uint64_t cases = 0;
  std::uint64_t failures = 0;
  std::string first_counterexample;
  std::string note;

  void fail(const std::string& what) {
    if (failures++ == 0) first_counterexample = what;
  }
};

inline SuiteResult start_suite(std::string name, int n) {
  SuiteResult r;
  r.suite = std::move(name);
  r.n = n;
  return r;
}

struct ValidationReport {
  std::vector<SuiteResult> suites;
  double seconds = 0.0;

  std::uint64_t failures() const {
    std::uint64_t f = 0;
    for (const auto& s : suites) f += s.failures;
    return f;
  }
  bool ok() const { return failures() == 0; }
};

using DeltaFn = std::function<int(Pattern3, const DyckPath&, int)>;

struct ValidationOptions {
  int n_max = 8;
  DeltaFn delta = [](Pattern3 a, const DyckPath& d, int i) { return delta_inv(a, d, i); };
};

namespace detail {

inline std::uint64_t catalan(int n) {
  std::uint64_t c = 1;
  for (int k = 0; k < n; ++k) c = c * 2 * (2 * k + 1) / (k + 2);
  return c;
}

inline std::string describe(Pattern3 a, const Permutation& p) { return to_string(a) + " sigma=" + format_permutation(p); }
inline std::string describe(Pattern3 a, const DyckPath& d) { return to_string(a) + " d=" + format_dyck(d); }

inline std::vector<Permutation> all_permutations(int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = i + 1;
  std::vector<Permutation> out;
  do out.emplace_back(v);
  while (std::next_permutation(v.begin(), v.end()));
  return out;
}

inline SuiteResult suite_enumeration(int n) {
  auto r = start_suite("enumeration", n);
  for (Pattern3 a : all_patterns) {
    const auto list = enumerate_avoiders(a, n);
    ++r.cases;
    if (list.size() != catalan(n)) r.fail(to_string(a) + " count " + std::to_string(list.size()));
    std::set<std::vector<int>> seen;
    for (const auto& p : list) {
      ++r.cases;
      if (!seen.insert({p.values().begin(), p.values().end()}).second) r.fail("duplicate " + describe(a, p));
      if (!avoids(a, p)) r.fail("non-avoider " + describe(a, p));
    }
    if (n <= 7) {
      std::size_t filtered = 0;
      for (const auto& p : all_permutations(n)) filtered += avoids(a, p);
      ++r.cases;
      if (filtered != list.size()) r.fail(to_string(a) + " filtered count " + std::to_string(filtered));
    }
  }
  return r;
}

inline SuiteResult suite_bijections(int n) {
  auto r = start_suite("bijections", n);
  for (Pattern3 a : {Pattern3::p231, Pattern3::p321}) {
    for_each_dyck(n, [&](const std::vector<int>& h) {
      const DyckPath d = DyckPath::from_heights(h);
      const Permutation p = dyck_to_perm(a, d);
      ++r.cases;
      if (!avoids(a, p) || perm_to_dyck(a, p) != d) r.fail(describe(a, d));
    });
  }
  return r;
}

inline SuiteResult suite_inversions(int n) {
  auto r = start_suite("inversion_formulas", n);
  for (Pattern3 a : {Pattern3::p231, Pattern3::p321}) {
    for_each_avoider(a, n, [&](const Permutation& p) {
      ++r.cases;
      if (inv_from_dyck(a, perm_to_dyck(a, p)) != inversions(p)) r.fail(describe(a, p));
    });
  }
  return r;
}

inline SuiteResult suite_delta(int n, const DeltaFn& delta) {
  auto r = start_suite("delta_rule", n);
  for (Pattern3 a : {Pattern3::p231, Pattern3::p321}) {
    for_each_dyck(n, [&](const std::vector<int>& h) {
      const DyckPath d = DyckPath::from_heights(h);
      const auto inv0 = inversions(dyck_to_perm(a, d));
      for (int i = 1; i < d.length(); ++i) {
        ++r.cases;
        const DyckPath e = flip(d, i);
        const auto expected = inversions(dyck_to_perm(a, e)) - inv0;
        const int got = delta(a, d, i);
        bool bad = got != expected;
        if (a == Pattern3::p231 && e != d && std::abs(got) != 1) bad = true;
        if (bad) {
          r.fail(describe(a, d) + " i=" + std::to_string(i) + " delta=" + std::to_string(got) +
                 " expected=" + std::to_string(expected));
        }
      }
    });
  }
  return r;
}

inline SuiteResult suite_symmetry(int n) {
  auto r = start_suite("symmetry", n);
  const std::int64_t pairs = static_cast<std::int64_t>(n) * (n - 1) / 2;
  for (Pattern3 a : all_patterns) {
    for_each_avoider(canonical(a), n, [&](const Permutation& p) {
      const Permutation q = symmetry_apply(a, p);
      ++r.cases;
      const auto expected = flips_inversions(a) ? pairs - inversions(p) : inversions(p);
      if (!avoids(a, q) || symmetry_apply(a, q) != p || inversions(q) != expected) r.fail(describe(a, q));
    });
  }
  return r;
}

inline SuiteResult suite_partition(int n) {
  auto r = start_suite("partition_bruteforce", n);
  for (Pattern3 a : all_patterns) {
    std::vector<BigInt> hist;
    for_each_avoider(a, n, [&](const Permutation& p) {
      const auto k = static_cast<std::size_t>(inversions(p));
      if (hist.size() <= k) hist.resize(k + 1);
      hist[k] += 1;
    });
    ++r.cases;
    if (partition_poly(a, n).coeffs != hist) r.fail(to_string(a) + " n=" + std::to_string(n));
  }
  return r;
}

inline SuiteResult suite_detailed_balance(int n) {
  auto r = start_suite("detailed_balance", n);
  for (Pattern3 a : {Pattern3::p231, Pattern3::p321}) {
    for (double beta : {-1.5, 0.0, 2.0}) {
      const double lq = beta / n;
      for_each_dyck(n, [&](const std::vector<int>& h) {
        const DyckPath d = DyckPath::from_heights(h);
        const ChainState s(a, n, beta, d);
        for (int i = 1; i < d.length(); ++i) {
          if (flip_kind(d, i) == 0) continue;
          ++r.cases;
          const ChainState t(a, n, beta, flip(d, i));
          const double lhs = std::exp(lq * static_cast<double>(s.inv())) * s.move_probability(i);
          const double rhs = std::exp(lq * static_cast<double>(t.inv())) * t.move_probability(i);
          if (std::abs(lhs - rhs) > 1e-12 * std::max(lhs, rhs)) {
            r.fail(describe(a, d) + " i=" + std::to_string(i) + " beta=" + std::to_string(beta));
          }
        }
      });
    }
  }
  return r;
}

inline SuiteResult suite_abpair(int n) {
  auto r = start_suite("abpair_invariants", n);
  for_each_avoider(Pattern3::p321, n, [&](const Permutation& p) {
    ++r.cases;
    const ABPair ab = strict_rl_minima(p);
    bool ok = ab.valid() && dyck_to_ab_321(ab_to_dyck_321(ab)) == ab && ab_to_perm_321(ab) == p;
    if (ok) {
      const auto m = empirical_measure_pair(p);
      ok = std::abs(m.first().mass() - m.second().mass()) < 1e-12;
    }
    if (!ok) r.fail(describe(Pattern3::p321, p));
  });
  return r;
}

inline SuiteResult suite_staircase(int n) {
  auto r = start_suite("staircase_invariants", n);
  const int G = 4 * n;
  for_each_avoider(Pattern3::p231, n, [&](const Permutation& p) {
    ++r.cases;
    const auto f = rlm_staircase(p);
    bool ok = f[0] == 0 && f[n] == n;
    for (int x = 0; x < n && ok; ++x) ok = f[x] <= f[x + 1] && f[x] <= x;
    if (ok) {
      const auto mu = permuton_from_rlm(RlmCurve::from_staircase(f), G);
      ok = mu.check(1e-12).ok && kolmogorov_distance(mu, permuton_of_perm(p, CellVariant::antidiag, G)) < 1e-12;
      const auto back = rlm_curve_of_permuton(mu, 1e-12);
      for (int i = 0; i <= G && ok; ++i) ok = std::abs(back[i] - static_cast<double>(f[i * n / G]) / n) < 1e-12;
    }
    if (!ok) r.fail(describe(Pattern3::p231, p));
  });
  return r;
}

inline SuiteResult suite_avoid_vs_occurrences(int n) {
  auto r = start_suite("avoid_vs_occurrences", n);
  for (const auto& p : all_permutations(n)) {
    for (Pattern3 a : all_patterns) {
      ++r.cases;
      if (avoids(a, p) != (occurrences(a, p) == 0)) r.fail(describe(a, p));
    }
  }
  return r;
}

inline SuiteResult suite_tilted_monotonicity(int n) {
  auto r = start_suite("tilted_monotonicity", n);
  for (Pattern3 a : {Pattern3::p231, Pattern3::p321}) {
    double prev = -1.0;
    for (double beta = -4.0; beta <= 4.0; beta += 1.0) {
      ++r.cases;
      const auto law = exact_tilted(a, n, beta);
      double total = 0.0;
      for (double q : law.probabilities) total += q;
      const double e = law.expected_inversions();
      if (std::abs(total - 1.0) > 1e-12 || (n >= 2 && !(e > prev))) {
        r.fail(to_string(a) + " beta=" + std::to_string(beta));
      }
      prev = e;
    }
  }
  return r;
}

inline SuiteResult suite_ball_monotonicity(int n) {
  auto r = start_suite("ball_monotonicity", n);
  r.note = "finite-n sanity ordering only";
  const int m = 2 * n;
  const std::vector<double> eps{0.0, 0.05, 0.1, 0.15, 0.2, 0.3, 0.5, 1.0};
  auto check = [&](const std::string& label, const std::function<double(double)>& prob) {
    double prev = -1.0;
    for (double e : eps) {
      ++r.cases;
      const double p = prob(e);
      if (p < prev - 1e-15 || (e >= 1.0 && std::abs(p - 1.0) > 1e-12)) r.fail(label + " eps=" + std::to_string(e));
      prev = p;
    }
  };
  const Excursion zero = Excursion::zero(m), tent = Excursion::tent(m);
  const MeasurePairD half(StepMeasure::uniform(n, 0.5), StepMeasure::uniform(n, 0.5));
  check("231 zero", [&](double e) { return exact_ball_probability(Pattern3::p231, n, 0.0, zero, e); });
  check("231 tent", [&](double e) { return exact_ball_probability(Pattern3::p231, n, 0.0, tent, e); });
  check("321 half", [&](double e) { return exact_ball_probability(Pattern3::p321, n, 0.0, half, e); });
  // Below n = 7 the 0.15-balls around zero and the tent each hold one atom.
  if (n >= 7) {
    ++r.cases;
    const double pz = exact_ball_probability(Pattern3::p231, n, 0.0, zero, 0.15);
    const double pt = exact_ball_probability(Pattern3::p231, n, 0.0, tent, 0.15);
    if (!(pz > pt)) r.fail("zero ball not heavier than tent ball at eps=0.15");
  }
  return r;
}

}  // namespace detail

/// Runs every exhaustive suite for n = 1..n_max (some suites stop earlier:
/// brute-force filtering at 7, partition at 10).
inline ValidationReport validate_all(const ValidationOptions& opt = {}) {
  if (opt.n_max < 1 || opt.n_max > 10) throw std::out_of_range("validate_all: n_max must be in 1..10");
  const auto start = std::chrono::steady_clock::now();
  ValidationReport rep;
  for (int n = 1; n <= opt.n_max; ++n) {
    rep.suites.push_back(detail::suite_enumeration(n));
    rep.suites.push_back(detail::suite_bijections(n));
    rep.suites.push_back(detail::suite_inversions(n));
    rep.suites.push_back(detail::suite_delta(n, opt.delta));
    rep.suites.push_back(detail::suite_symmetry(n));
    rep.suites.push_back(detail::suite_partition(n));
    rep.suites.push_back(detail::suite_detailed_balance(n));
    rep.suites.push_back(detail::suite_abpair(n));
    rep.suites.push_back(detail::suite_staircase(n));
    if (n <= 7) rep.suites.push_back(detail::suite_avoid_vs_occurrences(n));
    rep.suites.push_back(detail::suite_tilted_monotonicity(n));
    rep.suites.push_back(detail::suite_ball_monotonicity(n));
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

inline ValidationReport validate_all(int n_max) {
  ValidationOptions opt;
  opt.n_max = n_max;
  return validate_all(opt);
}

}  // namespace mallows
