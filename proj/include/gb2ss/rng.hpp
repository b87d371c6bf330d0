#ifndef GB2SS_RNG_HPP_
#define GB2SS_RNG_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace gb2ss {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// 64-bit FNV-1a; used to key per-period streams on period labels.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Stream keyed deterministically on (seed, tags...). Streams for different
// tag tuples are treated as independent; the mapping never depends on
// scheduling, which keeps multi-threaded runs bitwise reproducible.
inline Rng derive_stream(std::uint64_t seed,
                         std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t t : tags) h = splitmix64(h ^ splitmix64(t + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                    static_cast<std::uint32_t>(splitmix64(h)),
                    static_cast<std::uint32_t>(splitmix64(h) >> 32)};
  return Rng(seq);
}

// Uniform on the open interval (0, 1).
inline double uniform_open(Rng& rng) {
  for (;;) {
    const double u = std::generate_canonical<double, 53>(rng);
    if (u > 0.0) return u;
  }
}

inline double standard_normal(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return n(rng);
}

}  // namespace gb2ss

#endif  // GB2SS_RNG_HPP_
