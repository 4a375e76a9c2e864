/// @file parallel.hpp
/// @brief Minimal fork-join loop; capped by the CEL_THREADS environment variable.
#pragma once

#include <cstddef>
#include <functional>

namespace cel {

/// Worker count: CEL_THREADS if set and positive, else hardware concurrency.
int thread_count();

/// Runs body(begin, end) over contiguous chunks of [0, count).
/// Each index is owned by exactly one chunk, so results written per index
/// do not depend on the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 1);

}  // namespace cel
