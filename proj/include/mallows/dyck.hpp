#pragma once

// Dyck paths and their two bijections with length-3 avoiders.
//
// Heights are indexed d(0..2n) and steps s(1..2n), s(i) = d(i) - d(i-1).
// Local moves act at interior indices i in 1..2n-1 by swapping steps i and i+1.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mallows/core.hpp"

namespace mallows {

class DyckPath {
public:
  DyckPath() : heights_{0} {}

  /// Builds from a +1/-1 step sequence; throws unless it is a Dyck path.
  explicit DyckPath(const std::vector<int>& steps) {
    heights_.resize(steps.size() + 1);
    heights_[0] = 0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      if (steps[i] != 1 && steps[i] != -1) throw std::invalid_argument("Dyck steps must be +1 or -1");
      heights_[i + 1] = heights_[i] + steps[i];
      if (heights_[i + 1] < 0) throw std::invalid_argument("Dyck path goes below zero");
    }
    if (heights_.back() != 0) throw std::invalid_argument("Dyck path does not return to zero");
  }

  static DyckPath from_heights(std::vector<int> h) {
    if (h.empty() || h.size() % 2 == 0 || h.front() != 0 || h.back() != 0) {
      throw std::invalid_argument("height sequence must have odd length and zero endpoints");
    }
    for (std::size_t i = 1; i < h.size(); ++i) {
      if (h[i] < 0 || (h[i] - h[i - 1] != 1 && h[i] - h[i - 1] != -1)) {
        throw std::invalid_argument("invalid height sequence");
      }
    }
    DyckPath d;
    d.heights_ = std::move(h);
    return d;
  }

  /// Alternating word +1 -1 ... (the identity under both bijections).
  static DyckPath alternating(int n) {
    std::vector<int> h(2 * n + 1);
    for (int i = 0; i <= 2 * n; ++i) h[i] = i % 2;
    return from_heights(std::move(h));
  }

  /// U^n D^n.
  static DyckPath full_height(int n) {
    std::vector<int> h(2 * n + 1);
    for (int i = 0; i <= 2 * n; ++i) h[i] = std::min(i, 2 * n - i);
    return from_heights(std::move(h));
  }

  /// Tent of slope 1/2 (peak height about n/2).
  static DyckPath half_tent(int n) {
    std::vector<int> h(2 * n + 1, 0);
    for (int i = 1; i <= 2 * n; ++i) {
      const double target = std::min(i, 2 * n - i) / 2.0;
      const int up = h[i - 1] + 1;
      const bool can_return = up <= 2 * n - i;
      h[i] = (h[i - 1] == 0 || (can_return && up <= target + 0.5)) ? up : h[i - 1] - 1;
    }
    return from_heights(std::move(h));
  }

  int semilength() const noexcept { return static_cast<int>(heights_.size() / 2); }
  int length() const noexcept { return static_cast<int>(heights_.size()) - 1; }
  int height(int i) const { return heights_.at(i); }
  int step(int i) const { return heights_.at(i) - heights_.at(i - 1); }
  const std::vector<int>& heights() const noexcept { return heights_; }

  std::vector<int> steps() const {
    std::vector<int> s(length());
    for (int i = 1; i <= length(); ++i) s[i - 1] = heights_[i] - heights_[i - 1];
    return s;
  }

  int max_height() const {
    int m = 0;
    for (int h : heights_) m = std::max(m, h);
    return m;
  }

  friend bool operator==(const DyckPath&, const DyckPath&) = default;
  friend auto operator<=>(const DyckPath&, const DyckPath&) = default;

private:
  std::vector<int> heights_;
};

// ---------------------------------------------------------------------------
// Local moves

/// +1 if index i is a valley (can be raised), -1 if it is a peak of height >= 2
/// (can be lowered), 0 otherwise. `h` points at d(0).
inline int flip_kind(const int* h, int i) noexcept {
  const int l = h[i - 1], c = h[i], r = h[i + 1];
  if (l != r) return 0;
  if (c < l) return 1;
  return c >= 2 ? -1 : 0;
}

inline int flip_kind(const DyckPath& d, int i) {
  if (i < 1 || i >= d.length()) throw std::out_of_range("flip index out of range");
  return flip_kind(d.heights().data(), i);
}

inline DyckPath flip(const DyckPath& d, int i) {
  const int k = flip_kind(d, i);
  if (k == 0) return d;
  auto h = d.heights();
  h[i] += 2 * k;
  return DyckPath::from_heights(std::move(h));
}

/// Whether a flip at index i changes inv for the given canonical pattern.
/// Under the 321 word only even indices carry inversion weight.
inline bool index_weighted(Pattern3 canonical_pattern, int i) noexcept {
  return canonical_pattern == Pattern3::p231 || (i % 2 == 0);
}

inline int delta_inv(Pattern3 alpha, const DyckPath& d, int i) {
  if (!is_canonical(alpha)) throw std::invalid_argument("delta_inv needs a canonical pattern");
  return index_weighted(alpha, i) ? flip_kind(d, i) : 0;
}

// ---------------------------------------------------------------------------
// 231 bijection

inline DyckPath perm_to_dyck_231(const Permutation& p) {
  if (!avoids(Pattern3::p231, p)) throw std::invalid_argument("permutation contains 231");
  const auto f = rlm_staircase(p);
  const int n = p.size();
  std::vector<int> steps;
  steps.reserve(2 * n);
  for (int x = 0; x < n; ++x) {
    steps.push_back(1);
    for (int k = f[x]; k < f[x + 1]; ++k) steps.push_back(-1);
  }
  return DyckPath(steps);
}

/// Staircase F(0..n) read back from a path.
inline std::vector<int> staircase_of_dyck(const DyckPath& d) {
  const int n = d.semilength();
  std::vector<int> f(n + 1, 0);
  int x = 0, downs = 0;
  for (int i = 1; i <= d.length(); ++i) {
    if (d.step(i) == 1) {
      f[x++] = downs;
    } else {
      ++downs;
    }
  }
  f[n] = n;
  return f;
}

/// Inverse of perm_to_dyck_231. A path factors as D_L U D_R D around its last
/// return to zero; sigma = (sigma_L, max, sigma_R) with sigma_L below sigma_R.
inline Permutation dyck_to_perm_231(const DyckPath& d) {
  const int len = d.length();
  const int n = d.semilength();
  // match[j] = index of the up step paired with the down step at step index j (0-based).
  std::vector<int> match(len, -1);
  {
    std::vector<int> open;
    open.reserve(n);
    for (int j = 0; j < len; ++j) {
      if (d.step(j + 1) == 1) {
        open.push_back(j);
      } else {
        match[j] = open.back();
        open.pop_back();
      }
    }
  }
  struct Task {
    int begin, end, pos_offset, val_offset;
  };
  std::vector<int> sigma(n, 0);
  std::vector<Task> todo{{0, len, 0, 0}};
  while (!todo.empty()) {
    const Task t = todo.back();
    todo.pop_back();
    if (t.begin >= t.end) continue;
    const int k = match[t.end - 1];
    const int left = (k - t.begin) / 2;
    const int size = (t.end - t.begin) / 2;
    sigma[t.pos_offset + left] = t.val_offset + size;
    todo.push_back({t.begin, k, t.pos_offset, t.val_offset});
    todo.push_back({k + 1, t.end - 1, t.pos_offset + left + 1, t.val_offset + left});
  }
  return Permutation(std::move(sigma), Permutation::unchecked{});
}

// ---------------------------------------------------------------------------
// 321 bijection (interleaved word: odd steps from A, even steps from B)

inline DyckPath ab_to_dyck_321(const ABPair& ab) {
  if (!ab.valid()) throw std::invalid_argument("ABPair violates its invariants");
  const int n = ab.n;
  std::vector<int> steps(2 * n);
  for (int m = 1; m <= n; ++m) {
    steps[2 * m - 2] = 1;
    steps[2 * m - 1] = -1;
  }
  for (int a : ab.positions) steps[2 * a - 2] = -1;
  for (int b : ab.values) steps[2 * b - 1] = 1;
  return DyckPath(steps);
}

inline ABPair dyck_to_ab_321(const DyckPath& d) {
  ABPair ab;
  ab.n = d.semilength();
  for (int m = 1; m <= ab.n; ++m) {
    if (d.step(2 * m - 1) == -1) ab.positions.push_back(m);
    if (d.step(2 * m) == 1) ab.values.push_back(m);
  }
  return ab;
}

inline DyckPath perm_to_dyck_321(const Permutation& p) {
  if (!avoids(Pattern3::p321, p)) throw std::invalid_argument("permutation contains 321");
  return ab_to_dyck_321(strict_rl_minima(p));
}

/// Values B go to positions A in rank order; the rest fill in increasing order.
inline Permutation ab_to_perm_321(const ABPair& ab) {
  const int n = ab.n;
  std::vector<int> sigma(n, 0);
  std::vector<char> used(n + 1, 0);
  for (std::size_t i = 0; i < ab.positions.size(); ++i) {
    sigma[ab.positions[i] - 1] = ab.values[i];
    used[ab.values[i]] = 1;
  }
  int next = 1;
  for (int pos = 0; pos < n; ++pos) {
    if (sigma[pos] != 0) continue;
    while (used[next]) ++next;
    sigma[pos] = next++;
  }
  return Permutation(std::move(sigma), Permutation::unchecked{});
}

inline Permutation dyck_to_perm_321(const DyckPath& d) { return ab_to_perm_321(dyck_to_ab_321(d)); }

// ---------------------------------------------------------------------------
// Pattern-generic entry points

inline DyckPath perm_to_dyck(Pattern3 alpha, const Permutation& p) {
  if (!is_canonical(alpha)) throw std::invalid_argument("perm_to_dyck needs a canonical pattern");
  return alpha == Pattern3::p231 ? perm_to_dyck_231(p) : perm_to_dyck_321(p);
}

inline Permutation dyck_to_perm(Pattern3 alpha, const DyckPath& d) {
  if (!is_canonical(alpha)) throw std::invalid_argument("dyck_to_perm needs a canonical pattern");
  return alpha == Pattern3::p231 ? dyck_to_perm_231(d) : dyck_to_perm_321(d);
}

/// inv of the decoded permutation, read straight off the heights.
/// 231: sum of d(k-1) over up steps k. 321: half the sum of even-index heights.
inline std::int64_t inv_from_heights(Pattern3 alpha, const int* h, int n) noexcept {
  std::int64_t total = 0;
  if (alpha == Pattern3::p231) {
    for (int k = 1; k <= 2 * n; ++k) {
      if (h[k] > h[k - 1]) total += h[k - 1];
    }
  } else {
    for (int m = 1; m <= n; ++m) total += h[2 * m];
    total /= 2;
  }
  return total;
}

inline std::int64_t inv_from_dyck(Pattern3 alpha, const DyckPath& d) {
  if (!is_canonical(alpha)) throw std::invalid_argument("inv_from_dyck needs a canonical pattern");
  return inv_from_heights(alpha, d.heights().data(), d.semilength());
}

// ---------------------------------------------------------------------------
// Enumeration and text formats

/// Visits every Dyck path of semilength n in lexicographic order of its U/D word
/// (D before U). The callback receives the height array d(0..2n).
inline void for_each_dyck(int n, const std::function<void(const std::vector<int>&)>& visit) {
  if (n < 0) throw std::invalid_argument("negative semilength");
  std::vector<int> h(2 * n + 1, 0);
  // Iterative depth-first search; choice[i] records the step taken into d(i).
  std::vector<int> choice(2 * n + 1, 0);
  int i = 1;
  if (n == 0) {
    visit(h);
    return;
  }
  choice[1] = -2;  // sentinel: nothing tried yet at this depth
  while (i >= 1) {
    int next;
    if (choice[i] == -2) {
      next = -1;
    } else if (choice[i] == -1) {
      next = 1;
    } else {
      --i;
      continue;
    }
    choice[i] = next;
    const int hi = h[i - 1] + next;
    if (hi < 0 || hi > 2 * n - i) continue;
    h[i] = hi;
    if (i == 2 * n) {
      visit(h);
      continue;
    }
    ++i;
    choice[i] = -2;
  }
}

inline std::string format_dyck(const DyckPath& d) {
  std::string s;
  s.reserve(d.length());
  for (int i = 1; i <= d.length(); ++i) s += d.step(i) == 1 ? 'U' : 'D';
  return s;
}

inline DyckPath parse_dyck(std::string_view word) {
  std::vector<int> steps;
  steps.reserve(word.size());
  for (char c : word) {
    if (c == 'U') {
      steps.push_back(1);
    } else if (c == 'D') {
      steps.push_back(-1);
    } else {
      throw std::invalid_argument("Dyck word must use only U and D");
    }
  }
  return DyckPath(steps);
}

inline std::string dyck_csv(const DyckPath& d) {
  std::string out = "i,height\n";
  for (int i = 0; i <= d.length(); ++i) out += std::to_string(i) + ',' + std::to_string(d.height(i)) + '\n';
  return out;
}

}  // namespace mallows
