#pragma once

#include <cstddef>
#include <functional>

namespace gxt {

/// Worker count taken from the GXT_THREADS environment variable (default 1).
unsigned thread_count();

/// Runs body(i) for i in [0, n), split into contiguous blocks across
/// thread_count() workers. Each index is visited exactly once, so results
/// written to per-index slots are identical for any thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace gxt
