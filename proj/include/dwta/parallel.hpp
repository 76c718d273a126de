#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace dwta {

// Worker cap from DWTA_THREADS (0 or unset = hardware concurrency).
inline int worker_threads() {
  int n = 0;
  if (const char* env = std::getenv("DWTA_THREADS")) {
    try {
      n = std::stoi(env);
    } catch (...) {
      n = 0;
    }
  }
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(1, n);
}

// Runs fn(i) for i in [0, count). Each index must write disjoint output so results do not
// depend on scheduling.
template <typename Fn>
void parallel_for(int count, Fn&& fn) {
  const int threads = std::min(worker_threads(), count);
  if (threads <= 1 || count < 2) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = t; i < count; i += threads) fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace dwta
