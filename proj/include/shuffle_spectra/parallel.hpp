#ifndef SHUFFLE_SPECTRA_PARALLEL_HPP
#define SHUFFLE_SPECTRA_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace shuffle_spectra {

/// Thread count from SHUFFLE_SPECTRA_THREADS, else hardware concurrency.
inline unsigned default_thread_count() {
  if (const char* env = std::getenv("SHUFFLE_SPECTRA_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/**
 * Runs fn(chunk, begin, end) over `threads` contiguous chunks of [0, count).
 * Chunk boundaries depend only on (count, threads), so any per-chunk partial
 * results reduced in chunk order are deterministic for a fixed thread count.
 * The first exception thrown by a worker is rethrown on the caller.
 */
template <class Fn>
void parallel_chunks(std::size_t count, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    fn(std::size_t{0}, std::size_t{0}, count);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned c = 0; c < threads; ++c) {
      const std::size_t begin = count * c / threads;
      const std::size_t end = count * (c + 1) / threads;
      pool.emplace_back([&, c, begin, end] {
        try {
          fn(std::size_t{c}, begin, end);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

/// Effective chunk count used by parallel_chunks for the given arguments.
inline unsigned chunk_count(std::size_t count, unsigned threads) {
  return std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
}

}  // namespace shuffle_spectra

#endif  // SHUFFLE_SPECTRA_PARALLEL_HPP
