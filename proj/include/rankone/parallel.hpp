#pragma once

#include <cstddef>
#include <functional>

namespace rankone {

/// Worker cap used by parallel_for (default: hardware concurrency).
void set_thread_count(std::size_t n);
std::size_t thread_count();

/// Runs body(i) for i in [0, n). Iterations must write disjoint outputs;
/// callers reduce afterwards in index order so results do not depend on the
/// thread count. The first exception thrown by any iteration is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace rankone
