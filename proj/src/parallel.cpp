#include "fbmlab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace fbmlab {

void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)> &fn) {
  const std::size_t nthreads =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load())
        return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error)
          error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nthreads - 1);
  for (std::size_t k = 1; k < nthreads; ++k)
    pool.emplace_back(work);
  work();
  for (auto &t : pool)
    t.join();
  if (error)
    std::rethrow_exception(error);
}

std::vector<Block> make_blocks(std::size_t n_items, std::size_t block_size) {
  if (block_size == 0)
    block_size = 1;
  std::vector<Block> blocks;
  for (std::size_t b = 0, i = 0; i < n_items; ++b, i += block_size)
    blocks.push_back({b, i, std::min(n_items, i + block_size)});
  return blocks;
}

} // namespace fbmlab
