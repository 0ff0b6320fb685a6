#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace amtile {

/// Process-wide worker count for the parallel scans. Results never depend on it.
void set_thread_count(int n);
int thread_count();

/// Number of chunks parallel_chunks will use for n items.
inline std::size_t chunk_count(std::size_t n) {
  return std::min<std::size_t>(static_cast<std::size_t>(thread_count()), std::max<std::size_t>(n / 1024, 1));
}

/// Splits [0, n) into contiguous chunks, one per worker, and runs
/// fn(chunk, begin, end) on each. Chunk k always covers a lower range than
/// chunk k+1, so callers that reduce per-chunk results in chunk order get the
/// same answer as a sequential scan.
template <class Fn>
void parallel_chunks(std::size_t n, Fn&& fn) {
  const std::size_t workers = chunk_count(n);
  if (workers <= 1) {
    fn(std::size_t{0}, std::size_t{0}, n);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t b = n * w / workers;
    const std::size_t e = n * (w + 1) / workers;
    pool.emplace_back([&, w, b, e] {
      try {
        fn(w, b, e);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

}  // namespace amtile
