#ifndef GDCSMA_RNG_HPP
#define GDCSMA_RNG_HPP

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace gdcsma {

/// xoshiro256** seeded through SplitMix64. Output and the derived uniform /
/// bounded draws are identical on every platform, unlike the std distributions.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  /// Uniform integer in [0, bound), bound > 0 (Lemire's multiply-shift with rejection).
  std::uint32_t below(std::uint32_t bound);

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::array<std::uint64_t, 4> s_{};
};

/// FNV-1a, 64-bit.
std::uint64_t stable_hash(std::string_view bytes);

/// Seed for an independent stream keyed by cell coordinates.
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::string_view cell_key) {
  return seed ^ stable_hash(cell_key);
}

}  // namespace gdcsma

#endif  // GDCSMA_RNG_HPP
