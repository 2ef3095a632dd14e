#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace leocox {

/// Worker count: LEOCOX_WORKERS if set and positive, otherwise the hardware
/// concurrency (at least 1).
std::size_t worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. Work is
/// handed out by index, so results written to per-index slots are
/// independent of the thread count. The first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace leocox
