// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0

#include "scisplat/core/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace scisplat {

namespace {
std::atomic<int> g_thread_limit{0};
}

void set_thread_limit(int threads) { g_thread_limit.store(threads < 0 ? 0 : threads); }

int thread_limit() {
  const int limit = g_thread_limit.load();
  if (limit > 0) return limit;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& fn) {
  if (n <= 0) return;
  const int workers = std::min<std::int64_t>(thread_limit(), n);
  if (workers <= 1) {
    fn(0, n);
    return;
  }
  const std::int64_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const std::int64_t begin = w * chunk;
    const std::int64_t end = std::min<std::int64_t>(begin + chunk, n);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace scisplat
