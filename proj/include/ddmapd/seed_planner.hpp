#pragma once

#include <cstdint>
#include <optional>

#include "ddmapd/instance.hpp"
#include "ddmapd/plan.hpp"

namespace ddmapd {

struct SeedPlanFailure {
    int blocking_shelf = -1;
};

// Prioritized generation of a safe 1-robust MAPF shelf plan: shelves are
// planned one at a time with single-agent SIPP over the grid minus agent
// initial cells, reserving each earlier trajectory together with its
// one-step shadow (a cell occupied at t is blocked for later shelves over
// [t-1, t+1]). Stationary shelves (pickup == delivery) are reserved first;
// mover order is reshuffled on failure, up to `restarts` times.
// Deterministic in (instance, seed, restarts).
std::optional<ShelfPlan> plan_shelves_prioritized(const Instance& inst, uint64_t seed,
                                                  int restarts,
                                                  SeedPlanFailure* failure = nullptr);

}  // namespace ddmapd
