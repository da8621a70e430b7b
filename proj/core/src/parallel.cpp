#include "sspiv/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sspiv {

unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_for_chunks(unsigned workers, std::size_t count, std::size_t chunk_size,
                         const std::function<void(std::size_t, std::size_t)>& fn) {
  workers = resolve_workers(workers);
  chunk_size = std::max<std::size_t>(1, chunk_size);
  const std::size_t num_chunks = (count + chunk_size - 1) / chunk_size;
  if (count == 0) return;
  if (workers <= 1 || num_chunks <= 1) {
    for (std::size_t c = 0; c < num_chunks; ++c) {
      fn(c * chunk_size, std::min(count, (c + 1) * chunk_size));
    }
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1, std::memory_order_relaxed);
      if (c >= num_chunks) return;
      try {
        fn(c * chunk_size, std::min(count, (c + 1) * chunk_size));
      } catch (...) {
        std::lock_guard<std::mutex> lk(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> threads;
  const unsigned extra = std::min<std::size_t>(workers, num_chunks) - 1;
  threads.reserve(extra);
  for (unsigned i = 0; i < extra; ++i) threads.emplace_back(body);
  body();
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

void parallel_for(unsigned workers, std::size_t count,
                  const std::function<void(std::size_t)>& fn) {
  // Chunk size chosen from count alone to keep results thread-count invariant.
  const std::size_t chunk = std::max<std::size_t>(1, count / 64);
  parallel_for_chunks(workers, count, chunk, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) fn(i);
  });
}

}  // namespace sspiv
