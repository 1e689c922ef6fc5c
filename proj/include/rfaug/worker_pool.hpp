// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "rfaug/error.hpp"

namespace rfaug {

/// Runs fn(i) for every i in [0, count) on `workers` threads. Items are
/// handed out through a shared counter, so completion order is arbitrary;
/// callers that need ordered output write into per-index slots. The first
/// exception stops the hand-out and is rethrown on the calling thread.
/// Setting `*cancel` stops the hand-out and raises Cancelled.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn,
                  const std::atomic<bool>* cancel = nullptr) {
  if (workers < 1) {
    throw Error(ErrorCode::InvalidArgument, "worker count must be >= 1");
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto body = [&] {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      if (cancel && cancel->load(std::memory_order_relaxed)) return;
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed = true;
        return;
      }
    }
  };

  const auto threads = static_cast<std::size_t>(workers) < count
                           ? static_cast<std::size_t>(workers)
                           : count;
  if (threads <= 1) {
    body();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(body);
  }
  if (first_error) std::rethrow_exception(first_error);
  if (cancel && cancel->load()) {
    throw Error(ErrorCode::Cancelled, "operation cancelled");
  }
}

}  // namespace rfaug
