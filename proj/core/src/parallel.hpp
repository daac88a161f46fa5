// parallel.hpp (internal)
// Static-partition parallel loop. Each index is processed exactly once and
// writes only its own output slot, so results do not depend on the thread
// count.

#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mtvpar::detail {

template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr first_error;
  std::size_t first_index = count;
  std::mutex guard;
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t i = w; i < count; i += threads) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(guard);
            // Report the lowest failing index for deterministic errors.
            if (i < first_index) {
              first_index = i;
              first_error = std::current_exception();
            }
            return;
          }
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace mtvpar::detail
