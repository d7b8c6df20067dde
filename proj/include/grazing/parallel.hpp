#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <span>
#include <thread>
#include <vector>

namespace grazing {

// Worker count: GRAZING_THREADS caps it, default hardware parallelism.
inline int worker_count() {
  static int n = [] {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("GRAZING_THREADS")) {
      long v = std::strtol(env, nullptr, 10);
      if (v >= 1 && v < 1024) hw = static_cast<unsigned>(v);
    }
    return static_cast<int>(hw);
  }();
  return n;
}

// Number of work chunks used by parallel sweeps. Fixed (independent of the
// worker count) so that per-chunk partial results merge in the same order no
// matter how many threads run; this is what makes reductions bitwise
// reproducible at any GRAZING_THREADS setting.
inline constexpr int kSweepChunks = 16;

// Runs fn(chunk) for chunk in [0, n_chunks). Threads pull chunks off a shared
// counter; chunks must not race with each other on shared state.
inline void run_chunks(int n_chunks, const std::function<void(int)>& fn) {
  int workers = std::min(worker_count(), n_chunks);
  if (workers <= 1) {
    for (int c = 0; c < n_chunks; ++c) fn(c);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        int c = next.fetch_add(1);
        if (c >= n_chunks) break;
        fn(c);
      }
    });
  }
  for (auto& t : pool) t.join();
}

// Pairwise (fixed binary tree) summation. The tree shape depends only on n,
// so the result is independent of how work was scheduled.
inline double pairwise_sum(std::span<const double> a) {
  if (a.size() <= 16) {
    double s = 0.0;
    for (double v : a) s += v;
    return s;
  }
  size_t half = a.size() / 2;
  return pairwise_sum(a.subspan(0, half)) + pairwise_sum(a.subspan(half));
}

template <class Fn>
double pairwise_sum(size_t n, Fn&& fn) {
  if (n <= 16) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += fn(i);
    return s;
  }
  size_t half = n / 2;
  double lo = pairwise_sum(half, [&](size_t i) { return fn(i); });
  double hi = pairwise_sum(n - half, [&](size_t i) { return fn(half + i); });
  return lo + hi;
}

}  // namespace grazing
