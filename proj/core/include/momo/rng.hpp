#pragma once

#include <cstdint>

namespace momo {

/// SplitMix64 finalizer. The basis of every random value in the project.
std::uint64_t mix64(std::uint64_t x);

/// Order-sensitive combination of a seed with up to three stream keys.
std::uint64_t key_hash(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c);

/// Map 64 random bits to the open interval (0, 1).
double unit_open(std::uint64_t bits);

/// Counter-keyed standard normal deviate (Box-Muller). The same
/// (seed, a, b, c) always yields the same value regardless of call order,
/// so per-ticker streams do not depend on iteration order.
double keyed_normal(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c);

/// Sequential SplitMix64 stream, used for parameter initialization.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  double next_unit();  // [0, 1)
  double next_uniform(double lo, double hi);

 private:
  std::uint64_t state_;
};

}  // namespace momo
