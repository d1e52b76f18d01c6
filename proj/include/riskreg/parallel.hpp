#pragma once

#include <cstddef>
#include <functional>

namespace riskreg {

// Worker count resolution: explicit request > RISKREG_THREADS env > hardware.
std::size_t default_worker_count();
std::size_t resolve_worker_count(std::size_t requested);

// Runs body(i) for i in [0, count) across at most `workers` threads using a
// static stride partition. Task i always receives the same index regardless
// of the worker count, so any per-index output slot assignment is
// deterministic. The first exception thrown by any task is rethrown.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace riskreg
