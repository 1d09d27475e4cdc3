#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace drim {

// Runs fn(0..count-1) across up to `threads` workers. Tasks must write to
// disjoint slots; combined with per-task derived RNG streams this makes the
// parallel result identical to the serial one.
inline void parallel_for(std::size_t count, int threads,
                         const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace drim
