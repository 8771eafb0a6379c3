#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace sizegs {

// Thread count resolution order: explicit value > SIZEGS_THREADS > hardware.
inline unsigned default_thread_count() {
  if (const char* env = std::getenv("SIZEGS_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs f(begin, end) over disjoint chunks of [0, n). Callers must only write
// to per-index slots so the result is identical for any thread count.
template <typename F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
  if (n == 0) return;
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads == 1) {
    f(std::size_t{0}, n);
    return;
  }
  const std::size_t chunk = (n + threads - 1) / threads;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = static_cast<std::size_t>(t) * chunk;
    if (begin >= n) break;
    const std::size_t end = std::min(n, begin + chunk);
    pool.emplace_back([&f, begin, end] { f(begin, end); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace sizegs
