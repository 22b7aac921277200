#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace fbmlab {

struct ParallelOptions {
  int workers = 1;
  std::size_t block_size = 256;
};

// Runs fn(i) for i in [0, n) on up to `workers` threads. Work is handed out
// by index, so any result written to slot i is independent of scheduling.
// The first exception thrown by fn is rethrown on the calling thread.
void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)> &fn);

struct Block {
  std::size_t index;
  std::size_t begin;
  std::size_t end;
};

std::vector<Block> make_blocks(std::size_t n_items, std::size_t block_size);

// Computes one accumulator per fixed-size block, returned in block order.
template <class Acc, class Fn>
std::vector<Acc> map_blocks(std::size_t n_items, const ParallelOptions &opt,
                            Fn &&fn) {
  const auto blocks = make_blocks(n_items, opt.block_size);
  std::vector<Acc> out(blocks.size());
  parallel_for(blocks.size(), opt.workers,
               [&](std::size_t b) { out[b] = fn(blocks[b]); });
  return out;
}

} // namespace fbmlab
