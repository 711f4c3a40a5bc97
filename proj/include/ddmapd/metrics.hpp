#pragma once

#include "ddmapd/executor.hpp"
#include "ddmapd/plan.hpp"

namespace ddmapd {

struct MetricsReport {
    long long cost = 0;          // sum of agent path end times
    long long norm_cost = 0;     // cost - sum of original trajectory lengths
    int makespan = 0;
    double norm_makespan = 0.0;  // makespan - sum(|tau|)/N
    double switch_per_shelf = 0.0;
    double runtime_s = 0.0;
};

// Normalized metrics use the ORIGINAL (unsimplified) plan lengths; dummy
// segments are excluded throughout.
MetricsReport compute_metrics(const ExecutionResult& result, const ShelfPlan& original_plan,
                              int num_agents);

}  // namespace ddmapd
