#pragma once

// Deterministic sample-parallel loop: each index writes into its own slot, so
// the result is identical for any thread count (including 1).

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace slelab {

template <class Fn>
void parallel_for_samples(std::uint64_t n, Fn&& fn, unsigned n_threads = 0) {
  if (n_threads == 0) {
    n_threads = std::thread::hardware_concurrency();
    if (n_threads == 0) n_threads = 1;
  }
  if (n_threads <= 1 || n < 2 * n_threads) {
    for (std::uint64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  const std::uint64_t chunk = std::max<std::uint64_t>(1, n / (8 * n_threads));
  auto worker = [&] {
    for (;;) {
      const std::uint64_t lo = next.fetch_add(chunk);
      if (lo >= n) return;
      const std::uint64_t hi = std::min(n, lo + chunk);
      for (std::uint64_t i = lo; i < hi; ++i) fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace slelab
