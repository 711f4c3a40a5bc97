#pragma once

#include <vector>

#include "ddmapd/core.hpp"
#include "ddmapd/executor.hpp"

namespace ddmapd {

// Unexecuted trajectories reconstructed as a time-aligned MAPF shelf plan:
// committed paths first, unassigned shelves waiting until the earliest agent
// available time, then self-propelled advancement respecting every blocking
// arc. Positions are padded to the horizon; shelves park at their final
// waypoints.
struct Reconstruction {
    int horizon = 0;
    int t_avail_min = 0;
    std::vector<std::vector<Vertex>> pos;  // [shelf][t], t in [0, horizon]
    DepSchedule schedule;
};

Reconstruction extract_mapf(const ExecutionState& st);

// Single trajectory replanning: reroute the remaining waypoints of `shelf`
// to its delivery, minimizing arrival with ties broken toward the longest
// initially-unconstrained prefix. Accepted only if the rebuilt dependency
// graph stays acyclic; otherwise the prior plan and graph are restored.
bool single_replan(int shelf, ExecutionState& st);

// Dependency switching at shelf's next waypoint (infinite release): reverse
// the pending incoming arcs, recursively branching over detected cycles up
// to cfg.ds_depth_limit, accepting the first acyclic result whose estimated
// makespan does not exceed the current one.
bool dep_switch(int shelf, ExecutionState& st);

// Group trajectory replanning: reroute every constraining shelf around the
// blocked waypoint. Accepted only when all replans succeed, no arrival step
// increases, the graph stays acyclic, and the estimated makespan does not
// grow.
bool group_replan(int shelf, ExecutionState& st);

}  // namespace ddmapd
