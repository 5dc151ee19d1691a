#pragma once

#include <cstddef>
#include <functional>

namespace qmetro {

/// Number of workers: hardware concurrency, capped by the QFI_THREADS
/// environment variable when set.
std::size_t worker_count();

/// Runs fn(i) for i in [0, n) on a static partition of indices. Callers own
/// the output slots, so results are deterministic regardless of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace qmetro
