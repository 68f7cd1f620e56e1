#pragma once

#include <cstddef>
#include <functional>

namespace henonlab {

/// Executes task(i) for every i in [0, count). Implementations may run tasks
/// concurrently; tasks must only write to per-index state. The library never
/// spawns threads itself; callers that own a thread pool pass it in here.
using ParallelFor = std::function<void(std::size_t count, const std::function<void(std::size_t)>& task)>;

inline void run_serial(std::size_t count, const std::function<void(std::size_t)>& task) {
    for (std::size_t i = 0; i < count; ++i) task(i);
}

}  // namespace henonlab
