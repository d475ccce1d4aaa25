#pragma once

#include <cstddef>
#include <functional>

namespace gnireg {

// Upper bound on worker threads used by Monte-Carlo loops. 0 means
// "hardware concurrency". Defaults to 1.
void set_max_threads(std::size_t n);
std::size_t max_threads();

// Calls body(i) for every i in [0, n), fanning out over at most
// max_threads() workers. Callers write results into per-index slots and
// reduce afterwards in index order, so results never depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace gnireg
