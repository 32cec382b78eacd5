#ifndef RSHD_PARALLEL_HPP
#define RSHD_PARALLEL_HPP

#include <functional>

namespace rshd {

// Worker cap: hardware concurrency, clamped by the RESAMP_HD_THREADS
// environment variable. Always >= 1.
int worker_count();

// Runs fn(0..ntasks-1) across workers. Each task must write only its own
// output slot; results are then independent of the worker count and
// schedule. The first exception thrown by any task is rethrown.
void parallel_for(int ntasks, const std::function<void(int)>& fn);

} // namespace rshd

#endif
