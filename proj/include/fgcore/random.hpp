#ifndef FGCORE_RANDOM_HPP
#define FGCORE_RANDOM_HPP

// Portable random draws. The standard distributions are implementation
// defined, so reports would differ between standard libraries; everything
// here is built on the raw std::mt19937_64 stream, which is fully specified.

#include <cstdint>
#include <random>
#include <vector>

#include "fgcore/words.hpp"

namespace fgcore {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent stream `index` derived from `seed`.
inline Rng derive_rng(std::uint64_t seed, std::uint64_t index) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL)));
}

/// Uniform integer in [0, bound), bound > 0, by rejection.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

/// Uniform double in [0, 1).
inline double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform_real(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform_unit(rng); }

/// Uniform among the nonempty reduced words of length <= max_length over F_n.
inline Word random_reduced_word(Rng& rng, unsigned n, unsigned max_length) {
  // count(len) = 2n (2n-1)^(len-1); draw the length with those weights.
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
  std::uint64_t c = 2ULL * n;
  for (unsigned len = 1; len <= max_length; ++len) {
    counts.push_back(c);
    total += c;
    c *= (2ULL * n - 1);
  }
  std::uint64_t pick = uniform_below(rng, total);
  unsigned length = 1;
  for (std::uint64_t cnt : counts) {
    if (pick < cnt) break;
    pick -= cnt;
    ++length;
  }
  std::vector<Letter> letters;
  letters.reserve(length);
  for (unsigned i = 0; i < length; ++i) {
    if (letters.empty()) {
      letters.push_back(Letter::from_code(static_cast<unsigned>(uniform_below(rng, 2ULL * n))));
    } else {
      // Any letter except the inverse of the previous one.
      const unsigned forbidden = letters.back().inverse().code();
      unsigned code = static_cast<unsigned>(uniform_below(rng, 2ULL * n - 1));
      if (code >= forbidden) ++code;
      letters.push_back(Letter::from_code(code));
    }
  }
  return Word::reduce(n, letters);
}

template <class T>
void shuffle_portable(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace fgcore

#endif  // FGCORE_RANDOM_HPP
