#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "gsr/types.hpp"

namespace gsr {

/// Philox4x32-10 counter-based generator. The 64-bit seed is the key and the
/// stream id occupies the upper half of the 128-bit counter, so streams
/// derived from (seed, index) never overlap. Distributions are implemented
/// here rather than taken from <random> so draws are identical on every
/// standard library.
class Rng {
 public:
  static constexpr const char* kName = "philox4x32-10";

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  /// The raw block function, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 4> ctr,
                                             std::array<std::uint32_t, 2> key);

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  /// Uniform on [0,1) with 53 random bits.
  double uniform();
  /// Standard normal by the polar method.
  double normal();
  /// Uniform on {0, ..., n-1} without modulo bias.
  Index uniform_index(Index n);
  /// k distinct values from {0, ..., n-1} in random order.
  IndexList sample_without_replacement(Index n, Index k);

  Vec normal_vector(Index n);
  Vec uniform_vector(Index n);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> ctr_;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Stream id for sub-draws of one instance, e.g. derive_stream(index, 2).
std::uint64_t derive_stream(std::uint64_t index, std::uint32_t component);

}  // namespace gsr
