#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace ttlab {

// Index-parallel loop with deterministic output: the body writes only to
// its own index, results merge by position.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  unsigned workers = std::min<std::size_t>(std::thread::hardware_concurrency(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace ttlab
