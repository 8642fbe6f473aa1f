#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace simpx::parallel {

/// Worker count used by render, back-projection and the solver. 0 resets to
/// the hardware concurrency.
void set_threads(std::size_t n);
std::size_t threads();

/// Runs fn(i) for i in [0, n), splitting the range into contiguous blocks.
/// Callers only write to state owned by index i, so results do not depend on
/// the worker count.
template <typename Fn>
void for_each_index(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min(threads(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = n * w / workers;
    const std::size_t end = n * (w + 1) / workers;
    pool.emplace_back([&, w, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace simpx::parallel
