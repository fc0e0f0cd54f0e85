#pragma once

#include <cstddef>
#include <functional>

namespace blflow {

/// Worker count: BLFLOW_THREADS if set and positive, else hardware concurrency.
int worker_count();

/// Calls body(i) for i in [0, count) using up to worker_count() threads with
/// static contiguous chunking. Callers write results by index so the
/// reduction order stays fixed.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  std::size_t min_per_thread = 64);

}  // namespace blflow
