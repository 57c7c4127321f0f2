#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace growthlab {

/// Worker count from GROWTHLAB_WORKERS, falling back to the hardware thread count.
int default_worker_count();

/// Runs fn(i) for i in [0, count) on up to `workers` threads using contiguous blocks.
/// Each index is processed exactly once, so results written to slot i are independent of
/// the worker count. The exception of the lowest failing index is rethrown.
template <class Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
  if (count == 0) return;
  std::size_t w = workers < 1 ? 1 : static_cast<std::size_t>(workers);
  if (w > count) w = count;
  if (w == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> threads;
  threads.reserve(w);
  for (std::size_t t = 0; t < w; ++t) {
    const std::size_t lo = count * t / w;
    const std::size_t hi = count * (t + 1) / w;
    threads.emplace_back([&, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace growthlab
