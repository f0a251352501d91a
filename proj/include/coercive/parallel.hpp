#pragma once

#include <cstddef>
#include <functional>

namespace coercive {

// Worker count: COERCIVE_WORKERS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
std::size_t worker_count();

// Calls body(i) for i in [0, count) across worker_count() threads. Each index
// runs exactly once; the first exception thrown by any body is rethrown after
// all workers finish. Results must be written to per-index slots so the
// outcome does not depend on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace coercive
