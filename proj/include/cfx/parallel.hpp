#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace cfx {

/// Runs fn(i) for i in [0, n) on at most `limit` threads. `fn` must not
/// throw; callers capture failures per index.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t limit, Fn&& fn) {
  const std::size_t workers = std::min(n, std::max<std::size_t>(limit, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

}  // namespace cfx
