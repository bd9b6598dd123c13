// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 KGQuest Contributors

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace kgquest {

/// Calls fn(i) for every i in [0, n) on up to `threads` workers (the caller
/// is one of them). `fn` must not throw.
template <typename F>
void parallel_for(std::size_t n, std::size_t threads, F&& fn) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
  };
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  std::vector<std::jthread> pool;
  pool.reserve(threads - 1);
  for (std::size_t k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
}

}  // namespace kgquest
