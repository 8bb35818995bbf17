#pragma once

#include <cstddef>
#include <functional>

namespace sticky {

// Worker count used when a caller passes 0: STICKY_WORKERS if set, else the hardware count.
unsigned default_workers();

// Runs body(i) for i in [0, n) on up to `workers` threads (0 = default_workers()).
// Indices are split into contiguous blocks; the first exception is rethrown.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body);

}  // namespace sticky
