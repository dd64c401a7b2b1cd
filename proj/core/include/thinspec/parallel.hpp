#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

namespace thinspec {

// Worker count: set_worker_count() if called with n > 0, else the
// THINSPEC_WORKERS environment variable, else the number of logical cores.
int worker_count();
void set_worker_count(int n);

// Runs f(0) ... f(n-1) on up to worker_count() threads and returns the
// results in index order. If any job throws, the exception of the lowest
// failing index is rethrown after all jobs finish.
template <class F>
auto parallel_map(int n, F&& f) -> std::vector<std::invoke_result_t<F&, int>> {
  using T = std::invoke_result_t<F&, int>;
  std::vector<std::optional<T>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<int> next{0};
  const auto work = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        slots[i].emplace(f(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::min(worker_count(), n);
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace thinspec
