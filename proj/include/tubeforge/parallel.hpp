#pragma once

#include <cstddef>
#include <functional>

namespace tubeforge {

// Worker cap for internal parallelism. Initialized from TUBEFORGE_THREADS
// (0 or unset = hardware concurrency); set_thread_limit overrides it.
unsigned thread_limit();
void set_thread_limit(unsigned threads);

// Calls task(i) for every i in [0, count). Tasks must write only to their
// own slot of any shared output; scheduling never affects results.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task);

}  // namespace tubeforge
