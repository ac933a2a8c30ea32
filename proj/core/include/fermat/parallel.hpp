#pragma once

#include <cstddef>
#include <functional>

namespace fermat {

// Worker count used by data-parallel loops; 0 or 1 runs inline.
void set_thread_count(int n);
int thread_count();

// Calls f(i) for i in [0, n) over contiguous chunks; each index is written by exactly one worker,
// so results do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

}  // namespace fermat
