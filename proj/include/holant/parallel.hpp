#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace holant {

// Worker count: HOLANT_THREADS overrides hardware concurrency when set.
inline int worker_count(int n_tasks) {
  int w = static_cast<int>(std::thread::hardware_concurrency());
  if (w < 1) w = 1;
  if (const char* env = std::getenv("HOLANT_THREADS")) {
    int t = std::atoi(env);
    if (t >= 1) w = t;
  }
  return w < n_tasks ? w : n_tasks;
}

// Runs f(i) for i in [0, n). Tasks write only to their own output slots, so
// results do not depend on the worker count or on scheduling.
template <class F>
void parallel_for(int n, F&& f) {
  if (n <= 0) return;
  int workers = worker_count(n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex mu;
  auto run = [&] {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      if (failed.load(std::memory_order_relaxed)) return;
      try {
        f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failed.exchange(true)) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers) - 1);
  for (int t = 1; t < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (failed) std::rethrow_exception(first_error);
}

// Fixed-shape pairwise tree sum: the reduction order depends only on the
// number of terms, never on the worker count.
inline double tree_sum(const std::vector<double>& terms) {
  if (terms.empty()) return 0.0;
  std::vector<double> level = terms;
  while (level.size() > 1) {
    std::vector<double> up((level.size() + 1) / 2);
    for (std::size_t i = 0; i < up.size(); ++i) {
      double a = level[2 * i];
      double b = (2 * i + 1 < level.size()) ? level[2 * i + 1] : 0.0;
      up[i] = a + b;
    }
    level.swap(up);
  }
  return level[0];
}

}  // namespace holant
