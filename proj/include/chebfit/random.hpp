#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace chebfit::rng {

/// One step of the SplitMix64 sequence; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state);

/// 64-bit FNV-1a hash, used to turn purpose labels into stream keys.
std::uint64_t fnv1a(std::string_view text);

/// Seed for the stream identified by (seed, keys...). Keys are folded in
/// order through SplitMix64, so derive_seed(s, {a, b}) differs from
/// derive_seed(s, {b, a}).
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

/// Portable random stream over mt19937_64. The transforms below are written
/// out by hand so draws do not depend on the standard library vendor.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on the open interval (0, 1).
  double uniform_open();
  // Standard normal (Marsaglia polar method).
  double normal();
  // +1 or -1 with equal probability.
  double rademacher();
  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace chebfit::rng
