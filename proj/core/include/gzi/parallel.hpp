#pragma once

#include <cstddef>
#include <functional>

namespace gzi {

/// Worker count: GZI_THREADS if set and positive, else hardware concurrency.
unsigned default_thread_count();

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 = default).
/// Each index runs exactly once; the first exception thrown is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  unsigned threads = 0);

}  // namespace gzi
