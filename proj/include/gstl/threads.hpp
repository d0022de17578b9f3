#pragma once

#include <cstddef>
#include <functional>

namespace gstl {

// Worker budget for trial/fold/sample fan-out. GSTL_THREADS caps it; unset
// means all hardware threads. Always >= 1.
std::size_t thread_budget();

// Runs fn(0), ..., fn(n-1) across the thread budget. Each index is executed
// exactly once; callers keep determinism by writing results into
// preallocated slots. The first exception thrown by any job is rethrown
// after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace gstl
