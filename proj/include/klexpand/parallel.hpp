#pragma once

#include <cstddef>
#include <functional>

namespace klexpand {

/// Number of workers used when a caller passes `threads <= 0`.
/// Honors the KLEXPAND_THREADS environment variable, falls back to the core count.
int default_thread_count();

/// Splits [0, n) into contiguous, disjoint chunks and runs `body(begin, end)` on each,
/// one chunk per worker. Chunk boundaries depend only on `n` and the worker count,
/// so results that are accumulated per index are independent of scheduling.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace klexpand
