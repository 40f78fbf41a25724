#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace kdvh {

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Returns one
/// exception_ptr per item (null on success); nothing is rethrown.
inline std::vector<std::exception_ptr> parallel_for(int n, int jobs,
                                                    const std::function<void(int)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(jobs, 1, std::max(1, n));
  if (threads == 1) {
    worker();
    return errors;
  }
  std::vector<std::jthread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  return errors;
}

inline void rethrow_first(const std::vector<std::exception_ptr>& errors) {
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace kdvh
