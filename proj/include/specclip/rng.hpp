#pragma once

#include <array>
#include <cstdint>

namespace specclip {

struct SeedSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// Philox4x32-10 counter-based generator. The 64-bit seed is the key and the
/// counter is (block, substream, stream_lo, stream_hi), so every (seed, stream)
/// pair owns a disjoint sequence of 2^64 blocks and streams can be handed to
/// workers in any order without changing results.
class Philox {
 public:
  explicit Philox(SeedSpec spec, std::uint32_t substream = 0);

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  double normal();
  /// Cauchy(0, gamma) by inverse CDF.
  double cauchy(double gamma);
  /// Standard Student-t with nu degrees of freedom.
  double student_t(double nu);
  double gamma(double shape);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> buffer_{};
  int index_ = 4;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// One Philox4x32-10 block; exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Mixes several words into one stream id (SplitMix64 finalizer chain).
std::uint64_t mix_stream(std::uint64_t a, std::uint64_t b);

}  // namespace specclip
