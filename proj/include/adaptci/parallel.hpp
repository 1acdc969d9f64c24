#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace adaptci {

//! Worker count: `requested` if positive, else ADAPTCI_THREADS, else the hardware count.
unsigned resolve_threads(unsigned requested = 0);

//! Calls body(i) for i in [0, count) on up to `threads` workers with static
//! chunking. The first exception thrown by any task is rethrown after all join.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

} // namespace adaptci
