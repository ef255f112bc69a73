#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace dhawkes {

/// xoshiro256** engine. Streams are addressed by a key tuple hashed together
/// with the master seed, so any (cluster, point, attempt) stream can be
/// reconstructed without replaying the others. Satisfies
/// UniformRandomBitGenerator and works with the <random> distributions.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0);

  static Rng derive(std::uint64_t master, std::initializer_list<std::uint64_t> key);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform double on the open interval (0, 1).
  double uniform();

 private:
  std::array<std::uint64_t, 4> state_{};
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace dhawkes
