#pragma once

#include <cstddef>
#include <functional>

namespace profilematch {

// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
// visited exactly once; callers write results into per-index slots so the
// output is identical for any thread count. Exceptions from body are
// rethrown on the calling thread (first one wins).
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

// PROFILEMATCH_THREADS if set and valid, otherwise 1.
unsigned default_thread_count();

}  // namespace profilematch
