#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace mtom {

// Global worker cap set by the CLI --threads flag. 0 = hardware concurrency.
int thread_cap() noexcept;
void set_thread_cap(int n) noexcept;

// Runs fn(block) for block in [0, n_blocks). Blocks are independent units of
// work with their own seeds; callers combine per-block results in block order,
// so the outcome never depends on the number of workers.
inline void parallel_for_blocks(std::size_t n_blocks,
                                const std::function<void(std::size_t)>& fn) {
  const std::size_t hw = thread_cap() > 0
                             ? static_cast<std::size_t>(thread_cap())
                             : std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_workers = std::min(hw, n_blocks);
  if (n_workers <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) fn(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (std::size_t w = 0; w < n_workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1)) fn(b);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace mtom
