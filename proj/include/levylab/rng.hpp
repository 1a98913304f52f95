#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace levylab {

/// Philox4x32-10 counter-based block cipher (Salmon et al., SC'11).
/// Pure function of (counter, key); the basis for reproducible streams.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// A reproducible random stream identified by (seed, stream_id).
///
/// The seed is the cipher key; the stream id occupies the high half of the
/// 128-bit counter and the draw index the low half. Two streams with the same
/// pair produce bit-identical draws on every platform, independent of thread
/// scheduling, which is what lets path i of a Monte Carlo batch be simulated
/// on any thread.
///
/// Satisfies UniformRandomBitGenerator so it can feed Boost.Random
/// distributions directly.
class RngStream {
public:
  using result_type = std::uint32_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();
  /// Standard exponential.
  double exponential();
  /// Standard normal (Boost ziggurat).
  double normal();
  /// Poisson with the given mean (Boost PTRS / inversion).
  std::uint64_t poisson(double mean);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  /// Number of 32-bit words consumed so far.
  std::uint64_t words_consumed() const { return block_ * 4 + pos_ - 4; }

private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  unsigned pos_ = 4;
};

/// Streams for a Monte Carlo batch: path i uses stream_id = base + i.
inline RngStream path_stream(std::uint64_t seed, std::uint64_t path_index,
                             std::uint64_t base = 0) {
  return RngStream(seed, base + path_index);
}

} // namespace levylab
