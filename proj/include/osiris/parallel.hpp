#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace osiris {

// Worker threads to use: the OSIRIS_WORKERS environment variable when set
// (clamped to at least 1), otherwise the hardware concurrency.
inline int worker_count() {
  if (const char* env = std::getenv("OSIRIS_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
    return 1;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs fn(i) for every i in [0, n). Items must be independent and write only
// to their own output slots; the item-to-worker assignment is then
// irrelevant and results are identical for any worker count. The first
// exception thrown by an item is rethrown after all workers stop.
inline void parallel_for_index(long long n, const std::function<void(long long)>& fn) {
  if (n <= 0) return;
  const int workers = static_cast<int>(std::min<long long>(worker_count(), n));
  if (workers == 1) {
    for (long long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long long> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto body = [&] {
    for (;;) {
      const long long i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace osiris
