#ifndef GRANDRATE_PARALLEL_HPP
#define GRANDRATE_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace grandrate {

// Worker count: GRANDRATE_THREADS caps it when set, otherwise hardware
// concurrency (at least 1).
int default_worker_count();

// Runs fn(i) for i in [0, count) on a pool of `workers` threads pulling from a
// shared atomic counter. Results must be written to disjoint, preallocated
// slots so the output is independent of scheduling order. Exceptions from
// workers are rethrown on the calling thread.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

} // namespace grandrate

#endif
