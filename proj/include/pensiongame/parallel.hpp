#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pensiongame {

inline unsigned default_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

/// Calls fn(i) for i in [0, n). Items are claimed in chunks from a shared
/// counter, so fn must only write state owned by item i. Results then do
/// not depend on the thread count.
template <class Fn>
void parallel_for(std::int64_t n, unsigned threads, Fn&& fn, std::int64_t chunk = 64) {
  if (n <= 0) return;
  threads = std::max(1u, threads);
  const auto n_chunks = (n + chunk - 1) / chunk;
  if (threads == 1 || n_chunks == 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto worker = [&] {
    try {
      for (;;) {
        const std::int64_t c = next.fetch_add(1);
        if (c >= n_chunks) return;
        const std::int64_t end = std::min(n, (c + 1) * chunk);
        for (std::int64_t i = c * chunk; i < end; ++i) fn(i);
      }
    } catch (...) {
      std::lock_guard lock(err_mu);
      if (!err) err = std::current_exception();
      next.store(n_chunks);
    }
  };
  const unsigned n_workers = static_cast<unsigned>(std::min<std::int64_t>(threads, n_chunks));
  std::vector<std::thread> pool;
  pool.reserve(n_workers - 1);
  for (unsigned t = 1; t < n_workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace pensiongame
