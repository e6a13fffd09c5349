#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace rampflow {

/// Runs task(i) for i in [0, count) on at most `workers` threads. Tasks must
/// not share mutable state. If any task throws, the exception of the lowest
/// failing index is rethrown after all workers have joined.
inline void run_indexed(std::size_t count, std::size_t workers,
                        const std::function<void(std::size_t)>& task) {
  if (count == 0) return;
  workers = std::clamp<std::size_t>(workers, 1, count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto drain = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    drain();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(drain);
  }
  for (auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
}

}  // namespace rampflow
