// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <thread>
#include <vector>

#include "fstk/types.hpp"

namespace fstk {

/// Resolves a requested worker count: values <= 0 mean "use all cores".
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(i) for i in [begin, end) on up to `threads` workers.
///
/// Each index is handled exactly once and workers own disjoint contiguous
/// ranges, so callers that write to disjoint output slots per index get
/// results independent of the worker count.
template <typename Fn>
void parallel_for(Index begin, Index end, int threads, Fn&& fn) {
  const Index count = end - begin;
  if (count <= 0) return;
  const int workers =
      static_cast<int>(std::min<Index>(resolve_threads(threads), count));
  if (workers <= 1) {
    for (Index i = begin; i < end; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const Index chunk = (count + workers - 1) / workers;
  for (int t = 0; t < workers; ++t) {
    const Index lo = begin + chunk * t;
    const Index hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (Index i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace fstk
