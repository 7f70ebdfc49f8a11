#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace fairq {

// Worker count from FAIRQ_WORKERS, else the hardware concurrency (>= 1).
// Only affects scheduling, never results.
std::size_t worker_count();

// Runs body(0..n_tasks-1), each index exactly once, across worker_count()
// threads. Exceptions from any task are rethrown on the calling thread.
void parallel_for(std::size_t n_tasks,
                  const std::function<void(std::size_t)>& body);

// Monte Carlo work is cut into partitions of this many draws. Partition k of
// stream s under base seed b draws from rng_for_partition(b, s, k).
inline constexpr std::size_t kPartitionSize = 8192;

std::mt19937_64 rng_for_partition(std::uint64_t base_seed, std::uint64_t stream,
                                  std::uint64_t partition);

}  // namespace fairq
