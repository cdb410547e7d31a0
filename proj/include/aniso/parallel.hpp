#pragma once

#include <cstdint>
#include <functional>

namespace aniso {

/// Worker count: ANISO_THREADS if set (clamped to [1, 256]), else the
/// machine's core count.
int thread_budget();

/// Runs fn(i) for i in [0, count). Work is split into contiguous chunks, one
/// per worker; each index is visited exactly once, so per-slot writes give
/// results independent of the thread count.
void parallel_for(std::int64_t count, const std::function<void(std::int64_t)>& fn);

}  // namespace aniso
