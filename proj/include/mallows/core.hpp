#pragma once

// Permutations, pattern statistics and the symmetries of length-3 patterns.
//
// Positions and values are 1-based in every public function: `p.value(i)` is
// sigma(i) for i in 1..n. The staircase returned by `rlm_staircase` is indexed
// by x = 0..n.

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mallows {

/// A bijection of {1..n} in one-line notation.
class Permutation {
public:
  Permutation() = default;

  explicit Permutation(std::vector<int> values) : values_(std::move(values)) {
    const auto n = values_.size();
    std::vector<char> seen(n + 1, 0);
    for (int v : values_) {
      if (v < 1 || static_cast<std::size_t>(v) > n || seen[v]) {
        throw std::invalid_argument("not a permutation of 1.." + std::to_string(n));
      }
      seen[v] = 1;
    }
  }

  static Permutation identity(int n) {
    std::vector<int> v(n);
    for (int i = 0; i < n; ++i) v[i] = i + 1;
    return Permutation(std::move(v), unchecked{});
  }

  int size() const noexcept { return static_cast<int>(values_.size()); }
  int value(int position) const { return values_.at(position - 1); }
  std::span<const int> values() const noexcept { return values_; }

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

  // Skips validation; for decoders that construct bijections by design.
  struct unchecked {};
  Permutation(std::vector<int> values, unchecked) : values_(std::move(values)) {}

private:
  std::vector<int> values_;
};

/// The six patterns of length 3. Every one reduces to 231 or 321.
enum class Pattern3 { p123, p132, p213, p231, p312, p321 };

inline constexpr std::array<Pattern3, 6> all_patterns{Pattern3::p123, Pattern3::p132, Pattern3::p213,
                                                      Pattern3::p231, Pattern3::p312, Pattern3::p321};

inline std::array<int, 3> pattern_word(Pattern3 p) {
  switch (p) {
    case Pattern3::p123: return {1, 2, 3};
    case Pattern3::p132: return {1, 3, 2};
    case Pattern3::p213: return {2, 1, 3};
    case Pattern3::p231: return {2, 3, 1};
    case Pattern3::p312: return {3, 1, 2};
    case Pattern3::p321: return {3, 2, 1};
  }
  return {0, 0, 0};
}

inline std::string to_string(Pattern3 p) {
  const auto w = pattern_word(p);
  return {static_cast<char>('0' + w[0]), static_cast<char>('0' + w[1]), static_cast<char>('0' + w[2])};
}

inline Pattern3 parse_pattern(std::string_view s) {
  for (Pattern3 p : all_patterns) {
    if (to_string(p) == s) return p;
  }
  throw std::invalid_argument("unknown pattern '" + std::string(s) + "'");
}

inline bool is_canonical(Pattern3 p) noexcept { return p == Pattern3::p231 || p == Pattern3::p321; }

/// Dihedral moves used to reduce a pattern to its canonical representative.
enum class Symmetry { identity, reverse, complement, reverse_complement };

inline Symmetry symmetry_of(Pattern3 p) noexcept {
  switch (p) {
    case Pattern3::p231:
    case Pattern3::p321: return Symmetry::identity;
    case Pattern3::p213: return Symmetry::complement;
    case Pattern3::p312: return Symmetry::reverse_complement;
    case Pattern3::p132:
    case Pattern3::p123: return Symmetry::reverse;
  }
  return Symmetry::identity;
}

inline Pattern3 canonical(Pattern3 p) noexcept {
  switch (p) {
    case Pattern3::p123:
    case Pattern3::p321: return Pattern3::p321;
    default: return Pattern3::p231;
  }
}

/// Reverse and complement each send inv to C(n,2) - inv; their composite preserves inv.
inline bool flips_inversions(Pattern3 p) noexcept {
  const auto s = symmetry_of(p);
  return s == Symmetry::reverse || s == Symmetry::complement;
}

inline Permutation reverse(const Permutation& p) {
  std::vector<int> v(p.values().rbegin(), p.values().rend());
  return Permutation(std::move(v), Permutation::unchecked{});
}

inline Permutation complement(const Permutation& p) {
  const int n = p.size();
  std::vector<int> v(p.values().begin(), p.values().end());
  for (int& x : v) x = n + 1 - x;
  return Permutation(std::move(v), Permutation::unchecked{});
}

inline Permutation inverse(const Permutation& p) {
  std::vector<int> v(p.size());
  for (int i = 1; i <= p.size(); ++i) v[p.value(i) - 1] = i;
  return Permutation(std::move(v), Permutation::unchecked{});
}

/// Applies the involution carrying `alpha`-avoiders onto `canonical(alpha)`-avoiders.
/// Being an involution, the same call maps canonical avoiders back.
inline Permutation symmetry_apply(Pattern3 alpha, const Permutation& p) {
  switch (symmetry_of(alpha)) {
    case Symmetry::identity: return p;
    case Symmetry::reverse: return reverse(p);
    case Symmetry::complement: return complement(p);
    case Symmetry::reverse_complement: return complement(reverse(p));
  }
  return p;
}

/// Number of pairs i<j with p(i)>p(j), by merge-sort counting.
inline std::int64_t inversions(const Permutation& p) {
  std::vector<int> a(p.values().begin(), p.values().end());
  std::vector<int> buf(a.size());
  std::int64_t count = 0;
  for (std::size_t width = 1; width < a.size(); width *= 2) {
    for (std::size_t lo = 0; lo < a.size(); lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, a.size());
      const std::size_t hi = std::min(lo + 2 * width, a.size());
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (a[i] <= a[j]) {
          buf[k++] = a[i++];
        } else {
          count += static_cast<std::int64_t>(mid - i);
          buf[k++] = a[j++];
        }
      }
      while (i < mid) buf[k++] = a[i++];
      while (j < hi) buf[k++] = a[j++];
    }
    a.swap(buf);
  }
  return count;
}

/// Occurrences of an arbitrary pattern (given in one-line notation) by brute force.
/// Cost is C(n, k); meant for oracle-scale inputs.
inline std::int64_t occurrences(std::span<const int> pattern, const Permutation& p) {
  const int k = static_cast<int>(pattern.size());
  const int n = p.size();
  if (k == 0) return 1;
  if (k > n) return 0;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  std::int64_t count = 0;
  auto vals = p.values();
  while (true) {
    bool match = true;
    for (int a = 0; a < k && match; ++a) {
      for (int b = a + 1; b < k && match; ++b) {
        match = (pattern[a] < pattern[b]) == (vals[idx[a]] < vals[idx[b]]);
      }
    }
    if (match) ++count;
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == n - k + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int j = pos + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return count;
}

inline std::int64_t occurrences(Pattern3 alpha, const Permutation& p) {
  const auto w = pattern_word(alpha);
  return occurrences(std::span<const int>(w), p);
}

namespace detail {

// 321-avoiding iff the entries that are not left-to-right maxima increase.
inline bool avoids_321(std::span<const int> v) {
  int max_so_far = 0;
  int last_small = 0;
  for (int x : v) {
    if (x > max_so_far) {
      max_so_far = x;
    } else {
      if (x < last_small) return false;
      last_small = x;
    }
  }
  return true;
}

// Single-stack sortability (Knuth): sortable iff 231-avoiding.
inline bool avoids_231(std::span<const int> v) {
  std::vector<int> stack;
  stack.reserve(v.size());
  int next = 1;
  for (int x : v) {
    while (!stack.empty() && stack.back() < x) {
      if (stack.back() != next) return false;
      stack.pop_back();
      ++next;
    }
    stack.push_back(x);
  }
  while (!stack.empty()) {
    if (stack.back() != next) return false;
    stack.pop_back();
    ++next;
  }
  return true;
}

}  // namespace detail

/// Linear-time avoidance test; non-canonical patterns go through their symmetry.
inline bool avoids(Pattern3 alpha, const Permutation& p) {
  if (!is_canonical(alpha)) return avoids(canonical(alpha), symmetry_apply(alpha, p));
  return alpha == Pattern3::p321 ? detail::avoids_321(p.values()) : detail::avoids_231(p.values());
}

/// Positions A and values B of the strict right-to-left minima, sorted.
struct ABPair {
  int n = 0;
  std::vector<int> positions;  // a_1 < ... < a_k
  std::vector<int> values;     // b_1 < ... < b_k

  friend bool operator==(const ABPair&, const ABPair&) = default;

  /// Equal sizes, a_i > b_i, 1 < a_1, b_k < n, both strictly increasing.
  /// With those, the prefix domination condition is automatic.
  bool valid() const {
    if (positions.size() != values.size()) return false;
    for (std::size_t i = 0; i < positions.size(); ++i) {
      if (positions[i] < 1 || positions[i] > n || values[i] < 1 || values[i] > n) return false;
      if (positions[i] <= values[i]) return false;
      if (i > 0 && (positions[i] <= positions[i - 1] || values[i] <= values[i - 1])) return false;
    }
    return true;
  }
};

inline ABPair strict_rl_minima(const Permutation& p) {
  ABPair ab;
  ab.n = p.size();
  int suffix_min = p.size() + 1;
  for (int a = p.size(); a >= 1; --a) {
    const int b = p.value(a);
    if (b < suffix_min) {
      if (b < a) {
        ab.positions.push_back(a);
        ab.values.push_back(b);
      }
      suffix_min = b;
    }
  }
  std::reverse(ab.positions.begin(), ab.positions.end());
  std::reverse(ab.values.begin(), ab.values.end());
  return ab;
}

/// F(x) = min{ p(c) : c > x } - 1 for x = 0..n-1, and F(n) = n.
inline std::vector<int> rlm_staircase(const Permutation& p) {
  const int n = p.size();
  std::vector<int> f(n + 1);
  f[n] = n;
  int suffix_min = n + 1;
  for (int x = n - 1; x >= 0; --x) {
    suffix_min = std::min(suffix_min, p.value(x + 1));
    f[x] = suffix_min - 1;
  }
  return f;
}

// ---------------------------------------------------------------------------
// Text formats

inline std::string format_permutation(const Permutation& p) {
  std::string out;
  for (int i = 0; i < p.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(p.values()[i]);
  }
  return out;
}

inline Permutation parse_permutation(std::string_view line) {
  std::vector<int> v;
  std::istringstream in{std::string(line)};
  int x;
  while (in >> x) v.push_back(x);
  if (!in.eof()) throw std::invalid_argument("malformed permutation line");
  return Permutation(std::move(v));
}

inline std::string permutation_csv(const Permutation& p) {
  std::string out = "i,sigma_i\n";
  for (int i = 1; i <= p.size(); ++i) {
    out += std::to_string(i) + ',' + std::to_string(p.value(i)) + '\n';
  }
  return out;
}

/// Accepts the `i,sigma_i` CSV or the one-line text format.
inline Permutation parse_permutation_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty()) throw std::invalid_argument("empty permutation input");
  if (lines.front() != "i,sigma_i") return parse_permutation(lines.front());

  std::vector<int> v(lines.size() - 1, 0);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto comma = lines[r].find(',');
    if (comma == std::string::npos) throw std::invalid_argument("malformed CSV row: " + lines[r]);
    const int i = std::stoi(lines[r].substr(0, comma));
    const int s = std::stoi(lines[r].substr(comma + 1));
    if (i < 1 || static_cast<std::size_t>(i) > v.size()) throw std::invalid_argument("row index out of range");
    v[i - 1] = s;
  }
  return Permutation(std::move(v));
}

}  // namespace mallows
