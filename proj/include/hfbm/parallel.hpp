#pragma once

#include <cstddef>
#include <functional>

namespace hfbm {

// Worker count: explicit override if set, else HFBM_THREADS, else hardware
// concurrency. Always >= 1.
std::size_t thread_count();
void set_thread_count(std::size_t n);  // 0 restores the default lookup

// Calls fn(i) for i in [0, n). Iterations are handed out dynamically, so fn
// must only write to slots owned by i. The first exception thrown by any
// iteration is rethrown after all workers join. Nested calls run serially on
// the calling worker.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace hfbm
