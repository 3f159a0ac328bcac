#include "hgibbs/stats.hpp"

#include <cmath>
#include <cstdlib>

#include "hgibbs/errors.hpp"

namespace hgibbs {

void Welford::add(double x) {
  ++count;
  const double delta = x - mean;
  mean += delta / static_cast<double>(count);
  m2 += delta * (x - mean);
  if (x > max || std::isnan(x)) max = x;
}

void Welford::merge(const Welford& o) {
  if (o.count == 0) return;
  if (count == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(count);
  const double nb = static_cast<double>(o.count);
  const double n = na + nb;
  const double delta = o.mean - mean;
  mean = (na * mean + nb * o.mean) / n;
  m2 += o.m2 + delta * delta * na * nb / n;
  count += o.count;
  if (o.max > max || std::isnan(o.max)) max = o.max;
}

double Welford::variance() const {
  if (count < 2) return std::numeric_limits<double>::quiet_NaN();
  return m2 / static_cast<double>(count - 1);
}

double McEstimate::stderr_() const {
  if (acc.count < kMinSamplesForStderr) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(acc.variance() / static_cast<double>(acc.count));
}

void McEstimate::merge(const McEstimate& other) {
  if (other.acc.count == 0 && other.estimator.empty()) return;
  if (acc.count == 0 && estimator.empty()) {
    *this = other;
    return;
  }
  require(estimator == other.estimator, ErrorKind::contract,
          "cannot merge estimates of '" + estimator + "' and '" + other.estimator + "'");
  acc.merge(other.acc);
  chunks += other.chunks;
  if (chunk_size != other.chunk_size) chunk_size = 0;  // mixed layout
}

McEstimate merge(const McEstimate& a, const McEstimate& b) {
  McEstimate out = a;
  out.merge(b);
  return out;
}

ChunkLayout ChunkLayout::for_samples(std::uint64_t samples, std::uint64_t chunk_size) {
  require(chunk_size > 0, ErrorKind::invalid_argument, "chunk_size must be positive");
  return {chunk_size, (samples + chunk_size - 1) / chunk_size};
}

int resolve_threads(int requested) {
  if (const char* env = std::getenv("GIBBS_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

Welford reduce_in_order(const std::vector<Welford>& parts) {
  Welford out;
  for (const auto& p : parts) out.merge(p);
  return out;
}

McEstimate make_estimate(std::string estimator, const Welford& acc, std::uint64_t seed, const ChunkLayout& layout) {
  McEstimate e;
  e.estimator = std::move(estimator);
  e.acc = acc;
  e.seed = seed;
  e.chunks = layout.chunks;
  e.chunk_size = layout.chunk_size;
  return e;
}

}  // namespace hgibbs
