#pragma once

// Seeded random streams. The engine is std::mt19937_64, whose output sequence
// is fixed by the C++ standard, seeded through std::seed_seq (also fully
// specified). Integer and real draws are derived here rather than through the
// <random> distributions, whose algorithms vary between standard libraries.

#include <cstdint>
#include <random>

namespace mallows {

class Rng {
public:
  Rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound), bound >= 1 (Lemire's multiply-shift with rejection).
  std::uint64_t below(std::uint64_t bound) {
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = -bound % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  struct IndexDraw {
    std::uint32_t index;  // uniform in [0, bound)
    double u;             // uniform in (0, 1), 32-bit resolution
  };

  /// One engine call split in two: the high half picks an index, the low half
  /// gives an independent acceptance uniform.
  IndexDraw index_and_uniform(std::uint32_t bound) {
    while (true) {
      const std::uint64_t r = next();
      const std::uint64_t m = (r >> 32) * bound;
      const auto low = static_cast<std::uint32_t>(m);
      if (low < bound && low < static_cast<std::uint32_t>(-bound) % bound) continue;
      return {static_cast<std::uint32_t>(m >> 32), (static_cast<std::uint32_t>(r) + 0.5) * 0x1.0p-32};
    }
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
  std::mt19937_64 engine_;
};

inline Rng derive_rng(std::uint64_t seed, std::uint64_t stream_id) { return Rng(seed, stream_id); }

}  // namespace mallows
