#pragma once

#include <functional>

namespace surfelgrad {

// Process-wide cap on worker threads; 0 restores the hardware default.
void set_thread_count(int threads);
int thread_count();

// Runs body(begin, end) over contiguous chunks of [0, n). Chunks write
// disjoint outputs, so results do not depend on the thread count.
void parallel_for(int n, const std::function<void(int, int)>& body);

}  // namespace surfelgrad
