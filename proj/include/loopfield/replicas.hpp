#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include <omp.h>

#include "loopfield/rng.hpp"

namespace loopfield {

enum class Execution { serial, parallel };

/// Replica-parallel map/reduce. Replicas are processed in blocks: each block
/// is mapped (serially or with OpenMP), then reduced in index order on the
/// calling thread. Results therefore do not depend on the thread count.
///
/// `kernel(index, rng)` returns a per-replica result; `reduce(index, result)`
/// consumes it.
template <class Kernel, class Reduce>
void run_replicas(std::uint64_t count, std::uint64_t seed, Kernel&& kernel, Reduce&& reduce,
                  Execution exec = Execution::parallel, std::uint64_t block = 2048) {
  using Result = decltype(kernel(std::uint64_t{0}, std::declval<RandomStream&>()));
  std::vector<Result> results;
  for (std::uint64_t start = 0; start < count; start += block) {
    const std::uint64_t stop = std::min(count, start + block);
    const auto n = static_cast<std::int64_t>(stop - start);
    results.clear();
    results.resize(static_cast<std::size_t>(n));
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 16)
      for (std::int64_t i = 0; i < n; ++i) {
        const std::uint64_t index = start + static_cast<std::uint64_t>(i);
        RandomStream rng = derive_stream(seed, index);
        results[static_cast<std::size_t>(i)] = kernel(index, rng);
      }
    } else {
      for (std::int64_t i = 0; i < n; ++i) {
        const std::uint64_t index = start + static_cast<std::uint64_t>(i);
        RandomStream rng = derive_stream(seed, index);
        results[static_cast<std::size_t>(i)] = kernel(index, rng);
      }
    }
    for (std::int64_t i = 0; i < n; ++i) {
      reduce(start + static_cast<std::uint64_t>(i), std::move(results[static_cast<std::size_t>(i)]));
    }
  }
}

inline void set_thread_count(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

}  // namespace loopfield
