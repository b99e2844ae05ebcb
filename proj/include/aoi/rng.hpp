#pragma once

#include <array>
#include <cstdint>

namespace aoi {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3", SC'11). Pinned as RNG algorithm version 1: every trace in
/// this project is a pure function of (seed, stream, draw index) through this
/// block, so changing it changes all results.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

inline constexpr int rng_algorithm_version = 1;

/// SplitMix64 finalizer; used to derive child seeds from (parent, tag).
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag);

/// One independent random stream identified by (seed, stream id).
///
/// Counter layout: words 0-1 hold the 64-bit block index, words 2-3 the
/// 64-bit stream id; the key is the 64-bit seed. Each block yields two 64-bit
/// outputs. Streams are cheap to construct, so callers open one per epoch.
class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();

  /// Uniform on the open interval (0, 1) with 53 bits of resolution.
  double next_uniform();

  /// Number of 64-bit values consumed so far.
  std::uint64_t draws() const { return draws_; }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Child stream keyed by a derived seed; independent of this one.
  RngStream split(std::uint64_t tag) const;

private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int pos_ = 2;
  std::uint64_t draws_ = 0;
};

} // namespace aoi
