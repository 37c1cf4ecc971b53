#pragma once

// Brute-force helpers shared by the unit tests. Nothing here calls into the
// library's fast paths, so these serve as independent oracles.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "mallows/core.hpp"

namespace testing_support {

inline std::vector<mallows::Permutation> all_permutations(int n) {
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), 1);
  std::vector<mallows::Permutation> out;
  do {
    out.emplace_back(v);
  } while (std::next_permutation(v.begin(), v.end()));
  return out;
}

inline std::int64_t naive_inversions(const mallows::Permutation& p) {
  std::int64_t c = 0;
  for (int i = 1; i <= p.size(); ++i)
    for (int j = i + 1; j <= p.size(); ++j) c += p.value(i) > p.value(j);
  return c;
}

// Avoidance by exhaustive triple search.
inline bool naive_avoids(const std::vector<int>& pattern, const mallows::Permutation& p) {
  const int n = p.size();
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      for (int k = j + 1; k <= n; ++k) {
        const int a = p.value(i), b = p.value(j), c = p.value(k);
        if ((a < b) == (pattern[0] < pattern[1]) && (a < c) == (pattern[0] < pattern[2]) &&
            (b < c) == (pattern[1] < pattern[2]))
          return false;
      }
  return true;
}

inline std::vector<mallows::Permutation> filtered_avoiders(const std::vector<int>& pattern, int n) {
  std::vector<mallows::Permutation> out;
  for (auto& p : all_permutations(n))
    if (naive_avoids(pattern, p)) out.push_back(p);
  return out;
}

inline std::vector<int> word(mallows::Pattern3 a) {
  auto w = mallows::pattern_word(a);
  return {w[0], w[1], w[2]};
}

inline mallows::Permutation perm(std::initializer_list<int> v) { return mallows::Permutation(std::vector<int>(v)); }

}  // namespace testing_support
