#pragma once

#include <cstdint>

namespace ctising {

// Process-wide worker count for experiment drivers.  Chains are pure functions
// of their seed stream, so the fan-out never changes results: per-chain tallies
// are merged in chain order regardless of scheduling.
void set_worker_count(unsigned n);
unsigned worker_count();

}  // namespace ctising
