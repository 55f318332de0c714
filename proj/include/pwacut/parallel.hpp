#pragma once

#include <cstddef>
#include <functional>

namespace pwacut {

/// Worker count: `requested` if nonzero, else PWACUT_THREADS, else the
/// hardware concurrency.
std::size_t resolve_threads(std::size_t requested = 0);

/// Calls fn(i) for i in [0, count) on up to `threads` workers. Work is split
/// in contiguous blocks so results written by index do not depend on the
/// schedule. The first exception thrown by any call is rethrown.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace pwacut
