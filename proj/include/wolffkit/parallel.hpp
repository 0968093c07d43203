#pragma once

#include <cstddef>
#include <functional>

namespace wolffkit {

/// Worker cap for batch evaluation. 0 restores the default
/// (WOLFFKIT_THREADS if set, else the hardware concurrency).
void set_thread_count(int n);
int thread_count();

/// Calls body(i) for i in [0, n) on up to thread_count() workers. Each index
/// is processed exactly once; results written per index are deterministic.
/// The first exception thrown by a worker is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace wolffkit
