#pragma once
#include <cstdint>
#include <cmath>

namespace blpp {

// splitmix64 finalizer; also used as the documented stream-splitting function.
inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Substream key for (seed, stream, chunk). Chunked draws keep results
// independent of worker count: chunk c of stream s is the same bytes no
// matter which thread computes it.
inline uint64_t derive_stream(uint64_t seed, uint64_t stream, uint64_t chunk) {
  uint64_t h = mix64(seed);
  h = mix64(h ^ (0x9e3779b97f4a7c15ull * (stream + 1)));
  h = mix64(h ^ (0xc2b2ae3d27d4eb4full * (chunk + 1)));
  return h;
}

// xoshiro256++ (Blackman/Vigna), state seeded through splitmix64.
class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t z = seed;
    for (auto& w : s_) w = mix64(z), z = w ^ (z + 0x9e3779b97f4a7c15ull);
    have_normal_ = false;
  }

  uint64_t next_u64() {
    auto rotl = [](uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
    uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform in (0,1): 53-bit mantissa, never 0 (safe for logs)
  double uniform() {
    return ((next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() {
    if (have_normal_) { have_normal_ = false; return cached_; }
    double u1 = uniform(), u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    have_normal_ = true;
    return r * std::cos(a);
  }

  // Geom(1-q) on {0,1,2,...}: P(k) = (1-q) q^k
  long geometric(double q) {
    if (q <= 0.0) return 0;
    return static_cast<long>(std::floor(std::log(uniform()) / std::log(q)));
  }

 private:
  uint64_t s_[4];
  double cached_;
  bool have_normal_;
};

}  // namespace blpp
