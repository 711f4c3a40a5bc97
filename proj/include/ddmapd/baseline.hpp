#pragma once

#include "ddmapd/executor.hpp"

namespace ddmapd {

// Re-implementation of the MAPF-DECOMP prioritized-planning variant as the
// comparison baseline: agents are matched greedily to shelves whose next
// segment is currently released (no look-ahead), carrying is forward-only,
// and no constraint-release strategies run. Dummy-path mechanics match the
// CREST executor so the baseline stays complete on well-formed instances.
ExecutionResult run_decomp_pp(const Instance& inst, const ShelfPlan& plan,
                              const ExecutionConfig& cfg);

}  // namespace ddmapd
