#pragma once

#include <cstddef>
#include <functional>

namespace holab {

/// Number of worker threads used by parallel_for (default 1).
void set_workers(int workers);
int workers();

/// Calls body(i) for i in [0, count). Each index is handled by exactly one
/// thread; callers write results into per-index slots, so the output does not
/// depend on the worker count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace holab
