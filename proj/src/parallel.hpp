// Copyright 2026 evqa authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVQA_SRC_PARALLEL_HPP
#define EVQA_SRC_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace evqa::detail {

// Runs f(i) for i in [0, n) across `threads` workers in contiguous chunks.
// Callers write into pre-sized slots and reduce sequentially afterwards, so
// results do not depend on the worker count.
template <typename F>
void parallel_for(std::size_t n, int threads, F&& f) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &f] {
      for (std::size_t i = lo; i < hi; ++i) f(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

}  // namespace evqa::detail

#endif  // EVQA_SRC_PARALLEL_HPP
