#ifndef SCATE_RNG_HPP
#define SCATE_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace scate {

// All randomness in the project flows through these helpers so that outputs
// are byte-identical across platforms and standard-library versions
// (std::uniform_real_distribution et al. are implementation-defined).

inline double unit_uniform(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;  // [0, 1)
}

inline int draw_bernoulli(std::mt19937_64& g, double p) {
  return unit_uniform(g) < p ? 1 : 0;
}

// index into a cumulative-probability partition of [0,1)
template <typename Cum>
int draw_discrete(std::mt19937_64& g, const Cum& cum) {
  const double u = unit_uniform(g);
  int k = 0;
  const int last = static_cast<int>(cum.size()) - 1;
  while (k < last && u >= cum[k]) ++k;
  return k;
}

inline double gaussian(std::mt19937_64& g) {
  // Box-Muller on explicit uniforms; keeps the stream stable
  double u1 = unit_uniform(g), u2 = unit_uniform(g);
  if (u1 <= 0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(6.283185307179586476925286766559 * u2);
}

// splitmix64: derive independent child seeds from (seed, a, b)
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a,
                              std::uint64_t b = 0) {
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (a + 1) +
                    0xbf58476d1ce4e5b9ULL * (b + 1);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

}  // namespace scate

#endif
