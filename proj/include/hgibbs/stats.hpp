#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <limits>
#include <string>
#include <thread>
#include <vector>

namespace hgibbs {

/// Streaming mean / second central moment / maximum (Welford, Chan merge).
struct Welford {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;
  double max = -std::numeric_limits<double>::infinity();

  void add(double x);
  void merge(const Welford& other);
  /// Unbiased sample variance (NaN below two samples).
  double variance() const;
};

/// Monte Carlo result.  `estimator` names the integrand; merging estimates of
/// different integrands is a contract error.  Merge tolerance: relative 1e-12.
struct McEstimate {
  std::string estimator;
  Welford acc;
  std::uint64_t seed = 0;
  std::uint64_t chunks = 0;
  std::uint64_t chunk_size = 0;

  double mean() const { return acc.mean; }
  std::uint64_t n_samples() const { return acc.count; }
  double running_max() const { return acc.max; }
  /// Standard error of the mean; NaN when fewer than 100 samples.
  double stderr_() const;

  void merge(const McEstimate& other);
};

inline constexpr std::uint64_t kMinSamplesForStderr = 100;
inline constexpr double kMergeRelTol = 1e-12;

McEstimate merge(const McEstimate& a, const McEstimate& b);

/// Partition of a run into equally sized chunks.  The requested sample count
/// is rounded up to a whole number of chunks.
struct ChunkLayout {
  std::uint64_t chunk_size = 1000;
  std::uint64_t chunks = 0;

  static ChunkLayout for_samples(std::uint64_t samples, std::uint64_t chunk_size = 1000);
  std::uint64_t samples() const { return chunk_size * chunks; }
  std::uint64_t first_sample(std::uint64_t chunk) const { return chunk * chunk_size; }
};

/// Worker count: GIBBS_THREADS if set, else `requested` if positive, else the
/// number of hardware threads.
int resolve_threads(int requested);

/// Runs `body(chunk_index)` for every chunk on a small worker pool and returns
/// the results indexed by chunk.  Callers reduce in chunk order, so the
/// outcome does not depend on the number of threads.
template <class R, class F>
std::vector<R> run_chunks(const ChunkLayout& layout, int threads, F&& body) {
  std::vector<R> out(layout.chunks);
  const int nt = std::max(1, std::min<int>(resolve_threads(threads), static_cast<int>(layout.chunks)));
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr err;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (;;) {
      const std::uint64_t c = next.fetch_add(1);
      if (c >= layout.chunks || failed.load()) return;
      try {
        out[c] = body(c);
      } catch (...) {
        if (!failed.exchange(true)) err = std::current_exception();
        return;
      }
    }
  };
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int i = 0; i < nt; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);
  return out;
}

/// Merge per-chunk accumulators in chunk order.
Welford reduce_in_order(const std::vector<Welford>& parts);

McEstimate make_estimate(std::string estimator, const Welford& acc, std::uint64_t seed, const ChunkLayout& layout);

}  // namespace hgibbs
