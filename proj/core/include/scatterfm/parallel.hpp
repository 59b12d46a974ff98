#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sfm {

/// Process-wide worker count used by assembly and grid scans. 0 means
/// std::thread::hardware_concurrency(). Only scheduling depends on it.
void set_worker_count(int workers);
int worker_count();

/// Calls body(i) for i in [0, n). Each index is handled by exactly one worker,
/// so results are independent of the worker count as long as body(i) writes
/// only to slots owned by i.
template <class Body>
void parallel_for(int n, Body&& body) {
  const int workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int t = 1; t < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace sfm
