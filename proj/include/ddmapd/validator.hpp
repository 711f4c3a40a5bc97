#pragma once

#include <string>
#include <vector>

#include "ddmapd/executor.hpp"
#include "ddmapd/instance.hpp"
#include "ddmapd/plan.hpp"

namespace ddmapd {

struct ExecValidity {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
    std::string describe() const;
};

// Independent execution checker; shares no logic with the planners. Verifies
// agent and shelf collision-freedom (dummies appended), path step validity,
// shelf motion only under a co-located carrying agent, delta-step lift and
// place windows, completion at deliveries, and waypoint traversal order
// against the result's dependency arcs.
ExecValidity validate_execution(const ExecutionResult& result, const Instance& inst);

}  // namespace ddmapd
