#pragma once

#include <cstddef>
#include <functional>

namespace momo {

/// Run fn(0..n-1) on up to `workers` threads (0 = hardware concurrency).
/// Each index must write only its own output slot; the first exception is
/// rethrown on the calling thread after all workers join.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace momo
