#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace qdecouple {

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index is
/// handled exactly once; results must be written to per-index slots so the
/// outcome does not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (unsigned w = 0; w < threads; ++w)
    workers.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += threads) fn(i);
    });
}

/// Pairwise sum in a fixed association order.
template <class T>
T pairwise_sum(const std::vector<T>& values, std::size_t lo, std::size_t hi) {
  if (hi - lo <= 8) {
    T acc = values[lo];
    for (std::size_t i = lo + 1; i < hi; ++i) acc = acc + values[i];
    return acc;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(values, lo, mid) + pairwise_sum(values, mid, hi);
}

template <class T>
T pairwise_sum(const std::vector<T>& values) {
  return pairwise_sum(values, 0, values.size());
}

}  // namespace qdecouple
