#pragma once

#include <cstddef>
#include <functional>

namespace fracinv::parallel {

/// Worker count used by parallel_for; defaults to 1.
void set_threads(std::size_t count);
std::size_t threads();

/// Runs body(i) for i in [0, count), split into contiguous chunks across the
/// configured workers. Each index is visited exactly once; callers must not
/// let two indices write the same location.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace fracinv::parallel
