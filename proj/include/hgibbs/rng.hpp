#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace hgibbs {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

/// Counter-based stream of standard normals.
///
/// Every draw is a pure function of (root_seed, stream_id, position): the key
/// is the 64-bit seed, the 128-bit counter holds the block position in the low
/// words and the stream id in the high words.  Each block yields two normals
/// (Box-Muller on two 53-bit uniforms).
class RngStream {
 public:
  RngStream(std::uint64_t root_seed, std::uint64_t stream_id, std::uint64_t first_normal = 0);

  std::uint64_t root_seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }
  /// Index of the next normal to be returned.
  std::uint64_t position() const { return pos_; }

  /// Jump to normal number `idx` of this stream.
  void seek_normal(std::uint64_t idx);

  double normal();
  /// Uniform on (0,1), consuming one normal slot.
  double uniform();
  /// Raw 128 bits at block `block`, without touching the normal cursor.
  PhiloxCounter raw_block(std::uint64_t block) const;

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t pos_ = 0;
  std::uint64_t cached_block_ = ~std::uint64_t{0};
  double cache_[2] = {0.0, 0.0};
};

RngStream derive_stream(std::uint64_t root_seed, std::uint64_t stream_id);

/// Stream purposes used by the samplers.  Sample s of a run reads its
/// variables from normal positions [s << 32, (s + 1) << 32) of the purpose's
/// stream, so a draw depends only on (seed, purpose, sample, slot) and never on
/// chunking or thread layout.
enum class StreamPurpose : std::uint64_t {
  field = 0,       // g_n = B_n(1)
  innovation = 1,  // independent part of X_n(1) given B_n(1)
  oracle = 2,      // path simulations in tests
};

RngStream sample_stream(std::uint64_t root_seed, StreamPurpose purpose, std::uint64_t sample);

}  // namespace hgibbs
