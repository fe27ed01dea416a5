#pragma once

#include <cstddef>
#include <functional>

namespace amfg {

// Thread count from AMFG_THREADS, falling back to 1.
int default_thread_count();

// Splits [0, n) into at most `threads` contiguous chunks and runs
// body(begin, end) on each. Exceptions from workers are rethrown.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace amfg
