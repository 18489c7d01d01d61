#pragma once
// Seedable, splittable random streams. Every Monte Carlo routine in this
// library takes an explicit stream; a stream is fully determined by
// (master seed, experiment id, trial index), so results never depend on
// how trials are scheduled across workers.

#include <cstdint>
#include <cmath>
#include <string_view>

namespace lamplab {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// FNV-1a, used to turn experiment names into stream ids.
inline std::uint64_t experiment_id(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// xoshiro256++ (Blackman & Vigna, public domain). 256-bit state, fast
// enough for walk inner loops where std::mt19937_64 is the bottleneck.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t experiment, std::uint64_t trial) {
    std::uint64_t sm = seed;
    sm ^= 0x632be59bd9b4e019ULL * (experiment + 1);
    sm ^= 0x9e3779b97f4a7c15ULL * (trial + 1);
    for (auto& w : s_) w = splitmix64(sm);
    // splitmix never yields the all-zero state across four draws, but be
    // explicit: the generator is undefined there.
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
  }

  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~0ULL; }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Unbiased bounded draw (Lemire multiply-shift); n must be >= 1.
  std::uint64_t below(std::uint64_t n) {
    __uint128_t m = static_cast<__uint128_t>((*this)()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {  // possible bias; reject into the uniform region
      const std::uint64_t threshold = (0ULL - n) % n;
      while (lo < threshold) {
        m = static_cast<__uint128_t>((*this)()) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  double u01() {  // uniform on [0,1), 53 bits
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  bool coin() { return ((*this)() >> 63) != 0; }

  double normal() {  // Box-Muller, one value per call (throughput is fine)
    double u1 = u01(), u2 = u01();
    while (u1 <= 0.0) u1 = u01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

}  // namespace lamplab
