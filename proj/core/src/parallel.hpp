#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hyperfuse::detail {

/// Splits [0, count) into at most `threads` contiguous chunks and calls
/// fn(begin, end) for each, on the calling thread when threads <= 1.
/// The first exception thrown by a worker is rethrown after all join.
template <typename Fn>
void parallel_chunks(std::size_t count, int threads, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || count < 2) {
    fn(std::size_t{0}, count);
    return;
  }
  const auto chunks = std::min(workers, count);
  const auto step = (count + chunks - 1) / chunks;
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(chunks);
    for (std::size_t begin = 0; begin < count; begin += step) {
      const auto end = std::min(count, begin + step);
      pool.emplace_back([&, begin, end] {
        try {
          fn(begin, end);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace hyperfuse::detail
