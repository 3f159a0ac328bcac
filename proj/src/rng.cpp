#include "hgibbs/rng.hpp"

#include <cmath>
#include <numbers>

namespace hgibbs {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter c, PhiloxKey k) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kW0;
    k[1] += kW1;
  }
  return c;
}

RngStream::RngStream(std::uint64_t root_seed, std::uint64_t stream_id, std::uint64_t first_normal)
    : seed_(root_seed), stream_(stream_id), pos_(first_normal) {}

void RngStream::seek_normal(std::uint64_t idx) { pos_ = idx; }

PhiloxCounter RngStream::raw_block(std::uint64_t block) const {
  const PhiloxCounter ctr = {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                             static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
  const PhiloxKey key = {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
  return philox4x32_10(ctr, key);
}

void RngStream::refill() {
  const std::uint64_t block = pos_ >> 1;
  const PhiloxCounter r = raw_block(block);
  const double u1 = to_unit(r[0], r[1]);
  const double u2 = to_unit(r[2], r[3]);
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * std::numbers::pi * u2;
  cache_[0] = rad * std::cos(ang);
  cache_[1] = rad * std::sin(ang);
  cached_block_ = block;
}

double RngStream::normal() {
  if ((pos_ >> 1) != cached_block_) refill();
  return cache_[pos_++ & 1];
}

double RngStream::uniform() {
  const PhiloxCounter r = raw_block(pos_ >> 1);
  const double u = (pos_ & 1) ? to_unit(r[2], r[3]) : to_unit(r[0], r[1]);
  ++pos_;
  return u;
}

RngStream derive_stream(std::uint64_t root_seed, std::uint64_t stream_id) {
  return RngStream(root_seed, stream_id);
}

RngStream sample_stream(std::uint64_t root_seed, StreamPurpose purpose, std::uint64_t sample) {
  return RngStream(root_seed, static_cast<std::uint64_t>(purpose), sample << 32);
}

}  // namespace hgibbs
