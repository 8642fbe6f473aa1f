#include "simpx/parallel.hpp"

#include <atomic>

namespace simpx::parallel {

namespace {

std::size_t hardware() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

std::atomic<std::size_t> g_threads{0};

}  // namespace

void set_threads(std::size_t n) { g_threads = n; }

std::size_t threads() {
  const std::size_t n = g_threads;
  return n == 0 ? hardware() : n;
}

}  // namespace simpx::parallel
