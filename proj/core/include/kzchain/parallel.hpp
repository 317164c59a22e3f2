#pragma once

#include <cstddef>
#include <functional>

namespace kz {

// Worker count for embarrassingly parallel loops; honors the KZCHAIN_THREADS
// environment variable, otherwise the hardware concurrency.
unsigned worker_count();

// Runs fn(i) for i in [0, n) on worker_count() threads with a static block
// partition; results must be written to disjoint slots for determinism.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace kz
