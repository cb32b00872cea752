#ifndef PCMA_PARALLEL_HPP
#define PCMA_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace pcma {

// Worker cap honoring the PCMA_THREADS environment variable (>=1); falls back
// to hardware_concurrency.  All parallel loops aggregate results in job order,
// so outputs do not depend on scheduling.
std::size_t worker_count();

// Runs fn(j) for j in [0, n_jobs) on up to worker_count() threads.  Exceptions
// from jobs are captured and the first one (lowest job index) is rethrown.
void parallel_jobs(std::size_t n_jobs, const std::function<void(std::size_t)>& fn);

}  // namespace pcma

#endif
