#pragma once

#include <cstddef>
#include <functional>

namespace mdm {

/// Worker count: hardware concurrency, capped by the MDM_THREADS environment
/// variable when it holds a positive integer.
int worker_count();

/// Runs body(begin, end) over contiguous chunks of [0, n) on up to
/// worker_count() threads. Runs inline when one worker suffices.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 256);

}  // namespace mdm
