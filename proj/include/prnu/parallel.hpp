#pragma once

#include <functional>

namespace prnu {

/// Runs fn(0..count-1) across a small thread pool. Each index must write only
/// its own output slot; results are then independent of scheduling. threads=0
/// uses the hardware concurrency, threads=1 runs inline.
void parallel_for(int count, const std::function<void(int)>& fn, int threads = 0);

/// Process-wide default used when threads=0. Returns the previous value.
int set_default_thread_count(int threads);

} // namespace prnu
