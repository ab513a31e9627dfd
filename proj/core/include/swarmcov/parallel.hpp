#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace swarmcov {

/// Thread count from SWARMCOV_THREADS, falling back to 1.
int default_thread_count();

/// Independent generator for one (seed, stream) pair. Results never depend on
/// how streams are distributed over threads.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream);

/// Runs fn(0..n-1) over up to `threads` workers with static chunking. The
/// exception from the lowest failing index is rethrown after all workers join.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace swarmcov
