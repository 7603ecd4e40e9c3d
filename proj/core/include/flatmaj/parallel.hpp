#pragma once

#include <cstddef>
#include <functional>

namespace flatmaj {

// Worker budget: min(FLATMAJ_THREADS, hardware concurrency), at least 1.
int thread_budget();

// Runs fn(0) .. fn(n-1), striped across the thread budget. Callers get
// deterministic results by writing to index-addressed storage and reducing
// serially afterwards.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace flatmaj
