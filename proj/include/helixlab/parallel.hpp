#pragma once

#include <cstddef>
#include <functional>

namespace helixlab {

/// Worker count: HELIXLAB_THREADS if set (≥ 1), else hardware concurrency.
std::size_t thread_count();

/// Runs body(i) for i in [0, n). Each index is written by exactly one worker,
/// so callers that store by index get output independent of scheduling. After
/// all workers join, the exception from the lowest failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace helixlab
