#pragma once

// Metropolis chain on Dyck paths whose stationary law is proportional to
// q^inv with q = exp(beta / n), for either canonical pattern.
//
// A proposal picks i uniformly in 1..2n-1 and flips a peak or valley there.
// Moves with inversion change delta are accepted with probability
// min(1, q^delta). Indices where nothing can flip still count as steps.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mallows/core.hpp"
#include "mallows/dyck.hpp"
#include "mallows/rng.hpp"

namespace mallows {

enum class InitKind { minimal, maximal, alternating };

inline std::string to_string(InitKind k) {
  switch (k) {
    case InitKind::minimal: return "min";
    case InitKind::maximal: return "max";
    case InitKind::alternating: return "alt";
  }
  return "?";
}

inline InitKind parse_init(const std::string& s) {
  if (s == "min") return InitKind::minimal;
  if (s == "max") return InitKind::maximal;
  if (s == "alt") return InitKind::alternating;
  throw std::invalid_argument("unknown init '" + s + "'");
}

/// minimal: alternating word (identity); maximal: U^n D^n; alternating: half-slope tent.
inline DyckPath initial_path(InitKind k, int n) {
  switch (k) {
    case InitKind::minimal: return DyckPath::alternating(n);
    case InitKind::maximal: return DyckPath::full_height(n);
    case InitKind::alternating: return DyckPath::half_tent(n);
  }
  return DyckPath::alternating(n);
}

struct RunConfig {
  Pattern3 pattern = Pattern3::p231;
  int n = 1;
  double beta = 0.0;
  std::uint64_t steps = 0;
  std::uint64_t seed = 0;
  std::uint64_t thin = 0;
  InitKind init = InitKind::minimal;
  bool coupling_check = false;
  std::uint64_t checkpoints = 100;

  void validate() const {
    if (n < 1) throw std::invalid_argument("n must be at least 1");
    if (!std::isfinite(beta)) throw std::invalid_argument("beta must be finite");
    if (n > (1 << 30)) throw std::invalid_argument("n too large");
  }

  /// Tilt seen by the canonical chain: reverse and complement negate inv.
  double effective_beta() const { return flips_inversions(pattern) ? -beta : beta; }
};

class ChainState {
public:
  ChainState(Pattern3 canonical_pattern, int n, double beta, const DyckPath& init)
      : pattern_(canonical_pattern), n_(n), log_q_(beta / n), heights_(init.heights()) {
    if (!is_canonical(canonical_pattern)) throw std::invalid_argument("chain needs a canonical pattern");
    if (init.semilength() != n) throw std::invalid_argument("initial path has the wrong size");
    inv_ = inv_from_heights(pattern_, heights_.data(), n_);
    // Probability of accepting a move against the tilt.
    uphill_accept_ = std::exp(-std::abs(log_q_));
    favoured_ = log_q_ >= 0 ? 1 : -1;
    odd_inert_ = canonical_pattern == Pattern3::p321 ? 1 : 0;
  }

  Pattern3 pattern() const noexcept { return pattern_; }
  int n() const noexcept { return n_; }
  double log_q() const noexcept { return log_q_; }
  std::int64_t inv() const noexcept { return inv_; }
  std::uint64_t step_count() const noexcept { return steps_; }
  std::uint64_t accepted() const noexcept { return accepted_; }
  const std::vector<int>& heights() const noexcept { return heights_; }

  DyckPath path() const { return DyckPath::from_heights(heights_); }
  Permutation permutation() const { return dyck_to_perm(pattern_, path()); }

  /// Inversion change a flip at i would cause (0 if i is inert).
  int delta(int i) const noexcept {
    const int k = flip_kind(heights_.data(), i);
    return index_weighted(pattern_, i) ? k : 0;
  }

  /// One Metropolis step. Every step consumes exactly one engine draw.
  bool step(Rng& rng) {
    const auto draw = rng.index_and_uniform(static_cast<std::uint32_t>(2 * n_ - 1));
    return step_with(static_cast<int>(draw.index) + 1, draw.u);
  }

  /// One step at index i with acceptance uniform u; written without branches on
  /// the path shape, which is what dominates the cost at large n.
  bool step_with(int i, double u) {
    ++steps_;
    int* h = heights_.data();
    const int l = h[i - 1], c = h[i], r = h[i + 1];
    const int k = (l == r) * (int(c < l) - int((c > l) & (c >= 2)));
    const int d = k * (1 - (odd_inert_ & i));
    const int accept = int(d * favoured_ >= 0) | int(u < uphill_accept_);
    const int move = k * accept;
    h[i] += 2 * move;
    inv_ += d * accept;
    accepted_ += static_cast<std::uint64_t>(move != 0);
    return move != 0;
  }

  /// Exact one-step transition probability to flip(path, i) for a state-changing index.
  double move_probability(int i) const {
    const int k = flip_kind(heights_.data(), i);
    if (k == 0) return 0.0;
    const int d = index_weighted(pattern_, i) ? k : 0;
    const double accept = std::min(1.0, std::exp(log_q_ * d));
    return accept / (2 * n_ - 1);
  }

private:
  Pattern3 pattern_;
  int n_;
  double log_q_;
  double uphill_accept_ = 1.0;
  int favoured_ = 1;
  int odd_inert_ = 0;
  std::vector<int> heights_;
  std::int64_t inv_ = 0;
  std::uint64_t steps_ = 0;
  std::uint64_t accepted_ = 0;
};

struct CouplingPoint {
  std::uint64_t step;
  double sup_distance;
};

struct RunResult {
  Permutation final_permutation;  // in the configured (possibly non-canonical) pattern
  std::int64_t final_inv = 0;
  std::uint64_t accepted = 0;
  double accept_rate = 0.0;
  double wall_time = 0.0;
  std::vector<CouplingPoint> coupling;
};

/// Called with (step, permutation) every `thin` steps.
using SampleSink = std::function<void(std::uint64_t, const Permutation&)>;

inline double sup_distance(const std::vector<int>& a, const std::vector<int>& b) {
  int m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return static_cast<double>(m) / static_cast<double>(a.size() - 1);
}

/// Two chains from the minimal and maximal paths sharing every index and every
/// acceptance uniform. Reports max|d1 - d2| / (2n) at evenly spaced checkpoints.
inline std::vector<CouplingPoint> coupled_equilibration(const RunConfig& cfg, const DyckPath& low_init,
                                                        const DyckPath& high_init) {
  cfg.validate();
  const Pattern3 c = canonical(cfg.pattern);
  ChainState lo(c, cfg.n, cfg.effective_beta(), low_init);
  ChainState hi(c, cfg.n, cfg.effective_beta(), high_init);
  Rng rng = derive_rng(cfg.seed, 1);
  const std::uint64_t every = std::max<std::uint64_t>(1, cfg.steps / std::max<std::uint64_t>(1, cfg.checkpoints));
  std::vector<CouplingPoint> out{{0, sup_distance(lo.heights(), hi.heights())}};
  const auto range = static_cast<std::uint32_t>(2 * cfg.n - 1);
  for (std::uint64_t s = 1; s <= cfg.steps; ++s) {
    const auto draw = rng.index_and_uniform(range);
    const int i = static_cast<int>(draw.index) + 1;
    lo.step_with(i, draw.u);
    hi.step_with(i, draw.u);
    if (s % every == 0 || s == cfg.steps) out.push_back({s, sup_distance(lo.heights(), hi.heights())});
  }
  return out;
}

inline std::vector<CouplingPoint> coupled_equilibration(const RunConfig& cfg) {
  return coupled_equilibration(cfg, DyckPath::alternating(cfg.n), DyckPath::full_height(cfg.n));
}

/// Runs the chain for cfg.steps steps from cfg.init. Stream 0 of the seed
/// drives the chain; the coupling diagnostic, if requested, uses stream 1.
inline RunResult run_chain(const RunConfig& cfg, const SampleSink& sink = {}) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const Pattern3 c = canonical(cfg.pattern);
  ChainState state(c, cfg.n, cfg.effective_beta(), initial_path(cfg.init, cfg.n));
  Rng rng = derive_rng(cfg.seed, 0);

  auto emit = [&](std::uint64_t step) {
    if (sink) sink(step, symmetry_apply(cfg.pattern, state.permutation()));
  };

  if (cfg.thin > 0 && sink) {
    for (std::uint64_t s = 1; s <= cfg.steps; ++s) {
      state.step(rng);
      if (s % cfg.thin == 0) emit(s);
    }
  } else {
    for (std::uint64_t s = 0; s < cfg.steps; ++s) state.step(rng);
  }

  RunResult r;
  r.final_permutation = symmetry_apply(cfg.pattern, state.permutation());
  r.final_inv = flips_inversions(cfg.pattern) ? std::int64_t(cfg.n) * (cfg.n - 1) / 2 - state.inv() : state.inv();
  r.accepted = state.accepted();
  r.accept_rate = cfg.steps ? static_cast<double>(state.accepted()) / static_cast<double>(cfg.steps) : 0.0;
  if (cfg.coupling_check) r.coupling = coupled_equilibration(cfg);
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace mallows
