#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace modalkit {

//! Counter-seeded xoshiro256++ stream. Substreams are derived by absorbing
//! a list of indices through splitmix64, so any (seed, indices) pair maps
//! to an independent, reproducible stream regardless of thread layout.
class Rng {
public:
  explicit Rng(std::uint64_t seed) { seed_from(seed, {}); }
  Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> substream) {
    seed_from(seed, substream);
  }

  std::uint64_t next() {
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

  //! Uniform on (0, 1), 53-bit resolution, never exactly 0 or 1.
  double uniform01() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  //! Standard normal via Box-Muller; pairs cached.
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

  //! Index draw from cumulative weights (last entry treated as total).
  int categorical(const std::vector<double>& cumulative) {
    const double u = uniform01() * cumulative.back();
    for (std::size_t i = 0; i < cumulative.size(); ++i)
      if (u <= cumulative[i]) return static_cast<int>(i);
    return static_cast<int>(cumulative.size()) - 1;
  }

private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static std::uint64_t splitmix(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  void seed_from(std::uint64_t seed, std::initializer_list<std::uint64_t> substream) {
    std::uint64_t state = seed;
    for (std::uint64_t id : substream) {
      state ^= splitmix(state) + (id + 1) * 0x9E3779B97F4A7C15ULL;
      (void)splitmix(state);
    }
    for (auto& s : s_) s = splitmix(state);
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
  }

  std::uint64_t s_[4] = {};
  bool has_cached_ = false;
  double cached_ = 0.0;
};

} // namespace modalkit
