#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace cbtree {

/// Number of worker threads: hardware concurrency, capped by the
/// CBTREE_THREADS environment variable when it holds a positive integer.
/// Read on every call so tests can change it between runs.
unsigned worker_count();

/// Calls `task(i)` for every i in [0, count) on up to worker_count() threads.
/// Tasks must only write to state owned by index i; the caller is
/// responsible for combining per-index results in a fixed order.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task);

/// Pairwise reduction with a fixed binary tree shape that depends only on
/// values.size(). Combined with fixed chunk boundaries this makes parallel
/// reductions bit-reproducible regardless of thread count.
template <class T, class Combine>
T tree_reduce(std::vector<T> values, Combine combine, T empty) {
  if (values.empty()) return empty;
  while (values.size() > 1) {
    std::vector<T> next;
    next.reserve((values.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < values.size(); i += 2) {
      next.push_back(combine(values[i], values[i + 1]));
    }
    if (values.size() % 2 == 1) next.push_back(std::move(values.back()));
    values = std::move(next);
  }
  return std::move(values.front());
}

}  // namespace cbtree
