#pragma once

#include <cstddef>
#include <functional>

namespace nodalkit {

// Worker count for parallel loops. Defaults to NODALKIT_THREADS when set,
// else the hardware concurrency. A value of 0 restores the default.
void set_thread_count(unsigned count);
unsigned thread_count();

// Calls fn(i) for i in [0, n) on up to thread_count() threads. Each index is
// visited exactly once; the first exception thrown is rethrown to the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace nodalkit
