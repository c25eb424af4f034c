#ifndef SPECSHIFT_PARALLEL_HPP
#define SPECSHIFT_PARALLEL_HPP

#include <cstdint>
#include <functional>

namespace specshift {

/// Worker count: SPECSHIFT_THREADS when set (clamped to >= 1), otherwise
/// the hardware concurrency.
int worker_count();

/// Runs fn(i) for i in [0, n) across workers. Each index writes only its
/// own output slot, so results are deterministic regardless of schedule.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn);

}  // namespace specshift

#endif
