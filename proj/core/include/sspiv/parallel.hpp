#pragma once

#include <cstddef>
#include <functional>

namespace sspiv {

/// Runs fn(i) for i in [0, count) on up to `workers` threads (0 = hardware
/// concurrency). Work is handed out in chunks whose boundaries depend only on
/// `count`, so callers that write result slot i from iteration i get output
/// that is independent of the worker count.
void parallel_for(unsigned workers, std::size_t count,
                  const std::function<void(std::size_t)>& fn);

/// Chunked variant: fn(begin, end) over fixed-size chunks. chunk_size must
/// not depend on the worker count if deterministic output is required.
void parallel_for_chunks(unsigned workers, std::size_t count, std::size_t chunk_size,
                         const std::function<void(std::size_t, std::size_t)>& fn);

unsigned resolve_workers(unsigned requested);

}  // namespace sspiv
