#pragma once

#include <cstdint>
#include <functional>

namespace pepsim {

// Number of workers used for n_jobs independent jobs: the smaller of
// hardware concurrency (overridable with env PEPSIM_THREADS) and n_jobs,
// at least 1.
int worker_count(std::uint64_t n_jobs);

// Runs fn(job) for every job in [0, n_jobs). Jobs are handed out from a
// shared counter, so which worker runs a job is unspecified; callers must
// write into job-indexed slots and reduce in job order afterwards. Any
// exception thrown by a job is rethrown on the calling thread.
void parallel_for(std::uint64_t n_jobs,
                  const std::function<void(std::uint64_t)>& fn);

}  // namespace pepsim
