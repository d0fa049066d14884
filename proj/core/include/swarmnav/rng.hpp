#pragma once

#include <cstdint>
#include <random>

namespace swarmnav {

/// splitmix64 step. Used to derive independent substream seeds from a root
/// seed plus integer tags, so worker/stage/episode streams never overlap by
/// construction of the tags.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = root;
  std::uint64_t h = splitmix64(s);
  s ^= a + 0x9E3779B97F4A7C15ull;
  h ^= splitmix64(s);
  s ^= b + 0xD1B54A32D192ED03ull;
  h ^= splitmix64(s);
  s ^= c + 0x8CB92BA72F3D8DD7ull;
  h ^= splitmix64(s);
  return h;
}

/// Deterministic RNG wrapper. All randomness in the library flows through
/// this type; conversions to double avoid std::uniform_real_distribution,
/// whose output is not pinned down by the standard, so identical seeds give
/// identical streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). Rejection-free modulo bias is negligible for
  /// the small n used here, but we reject anyway to keep draws exact.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n <= 1) return 0;
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = gen_();
    } while (v >= limit);
    return v % n;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace swarmnav
