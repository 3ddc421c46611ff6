#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace paramot {

// Worker cap for all parallel regions. Numeric results never depend on it:
// every reduction has a tree shape that is a pure function of the element
// count, and parallel bodies write to disjoint slots.
int max_threads();
void set_max_threads(int n);

// Runs body(block_index) for block_index in [0, nblocks), possibly on worker
// threads. Blocks are claimed from an atomic counter; bodies must only touch
// per-block state. Exceptions are collected and the one from the smallest
// block index is rethrown. Nested calls run inline on the calling thread.
void parallel_for_blocks(std::size_t nblocks,
                         const std::function<void(std::size_t)>& body);

inline constexpr std::size_t kReduceLeaf = 128;

namespace detail {

template <class T>
T pairwise_combine(std::vector<T>& parts, std::size_t lo, std::size_t hi) {
  const std::size_t len = hi - lo;
  if (len == 1) return std::move(parts[lo]);
  std::size_t half = 1;
  while (half * 2 < len) half *= 2;
  T left = pairwise_combine(parts, lo, lo + half);
  left += pairwise_combine(parts, lo + half, hi);
  return left;
}

}  // namespace detail

// Deterministic blocked-pairwise reduction over indices [0, count).
// Leaf blocks of kReduceLeaf consecutive indices are folded serially in index
// order via leaf(acc, i); block partials are combined by a fixed-shape binary
// tree. Leaf evaluation may run in parallel; the result is bit-identical for
// any worker count.
template <class T, class LeafFn>
T reduce_indexed(std::size_t count, T zero, LeafFn&& leaf) {
  if (count == 0) return zero;
  const std::size_t nblocks = (count + kReduceLeaf - 1) / kReduceLeaf;
  std::vector<T> parts(nblocks, zero);
  parallel_for_blocks(nblocks, [&](std::size_t b) {
    T acc = zero;
    const std::size_t lo = b * kReduceLeaf;
    const std::size_t hi = std::min(count, lo + kReduceLeaf);
    for (std::size_t i = lo; i < hi; ++i) leaf(acc, i);
    parts[b] = std::move(acc);
  });
  return detail::pairwise_combine(parts, 0, nblocks);
}

// Blocked-pairwise sum of a contiguous buffer; same tree shape as
// reduce_indexed over the same count.
double pairwise_sum(const double* x, std::size_t n);

}  // namespace paramot
