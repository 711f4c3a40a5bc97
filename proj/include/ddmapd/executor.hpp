#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ddmapd/core.hpp"
#include "ddmapd/dependency_graph.hpp"
#include "ddmapd/distance.hpp"
#include "ddmapd/instance.hpp"
#include "ddmapd/mlsipp.hpp"
#include "ddmapd/plan.hpp"
#include "ddmapd/reservation.hpp"

namespace ddmapd {

struct LiftPlaceEvent {
    bool is_lift = true;
    int agent = -1;
    int shelf = -1;
    int time = 0;  // start of the delta-step window
};

struct RoundRecord {
    int agent = -1;
    int shelf = -1;
};

struct StrategyAudit {
    int str_attempts = 0, str_accepted = 0;
    int ds_attempts = 0, ds_accepted = 0;
    int gtr_attempts = 0, gtr_accepted = 0;
    int acyclicity_failures = 0;        // ever-observed acyclicity breaks
    int restore_mismatches = 0;         // rejected attempt left state changed
    int makespan_regressions = 0;       // accepted DS/GTR raised the estimate
    int arrival_regressions = 0;        // accepted GTR raised an arrival step
    bool clean() const {
        return acyclicity_failures == 0 && restore_mismatches == 0 &&
               makespan_regressions == 0 && arrival_regressions == 0;
    }
};

struct ExecutionResult {
    std::string method;
    int overhead_delta = 0;
    std::vector<std::vector<Vertex>> agent_paths;  // position at every t from 0
    std::vector<std::vector<Vertex>> shelf_paths;
    // Per agent; empty when the agent holds no live dummy at termination.
    // Appended to the walked execution for validation, excluded from costs.
    std::vector<TimedPath> leftover_dummies;
    std::vector<LiftPlaceEvent> events;
    std::vector<RoundRecord> rounds;
    DependencyGraph final_dep;  // final trajectories + validation arc set
    StrategyAudit audit;
    double wall_seconds = 0.0;

    int makespan() const {
        int m = 0;
        for (const auto& p : agent_paths) m = std::max(m, static_cast<int>(p.size()) - 1);
        return m;
    }
};

// Mutable per-run state shared between the main loop and the
// constraint-release strategies. Single-writer, never shared across threads.
struct ExecutionState {
    const Instance* inst = nullptr;
    const DistanceOracle* oracle = nullptr;
    ExecutionConfig cfg;
    DependencyGraph dep;
    std::vector<std::vector<Vertex>> agent_paths;
    std::vector<std::vector<Vertex>> shelf_paths;
    std::vector<std::optional<TimedPath>> dummies;
    std::vector<int> agent_assignment;  // shelf id or -1
    std::vector<int> agent_carrying;    // shelf currently held (not yet placed) or -1
    std::vector<char> agent_active;
    std::vector<char> agent_newly_assigned;
    std::vector<int> shelf_assigned_to;  // agent id or -1
    std::vector<LiftPlaceEvent> events;
    std::vector<RoundRecord> rounds;
    StrategyAudit audit;

    int num_agents() const { return inst->num_agents(); }
    int num_shelves() const { return inst->num_shelves(); }
    int t_avail(int a) const {
        return static_cast<int>(agent_paths[static_cast<size_t>(a)].size()) - 1;
    }
    Vertex agent_cell(int a) const { return agent_paths[static_cast<size_t>(a)].back(); }
    int shelf_end(int s) const {
        return static_cast<int>(shelf_paths[static_cast<size_t>(s)].size()) - 1;
    }
    int t_avail_min() const;
    std::vector<int> shelf_end_times() const;
    std::vector<char> shelf_assigned_flags() const;
    int release_time(int s) const { return dep.release_time(s, shelf_end(s)); }
};

// Estimated earliest start time for agent a to carry shelf s toward its next
// waypoint: max(t_avail + dist(a.current, s.current), t_rel).
int t_hat_start(int agent, int shelf, const ExecutionState& st);

// Hungarian matching over unassigned agents and candidate shelves (finite
// release, uncompleted, unassigned); returns the matched pair minimizing
// t_hat_start, or nullopt when the matrix is empty.
std::optional<RoundRecord> shelf_assignment(const ExecutionState& st);

// Full two-layer table for the current commitments: agent paths, live
// dummies, terminal holds, and shelf paths holding their current cells.
ReservationTable build_reservations(const ExecutionState& st);

// Shared setup/teardown for both executors. Init validates the plan, builds
// the dependency graph, and seeds singleton paths.
void init_execution_state(ExecutionState& st, const Instance& inst, const ShelfPlan& plan,
                          const ExecutionConfig& cfg, const DistanceOracle& oracle);
ExecutionResult finalize_result(ExecutionState& st, const std::string& method);

// Plans the unconstrained segment of the agent's shelf via MLSIPP and
// commits paths, events, and traversal times into the state. In CREST mode
// (forward_only = false) the shelf stays on the agent afterwards; the
// matching place + dummy happen in finish_carry when the agent switches or
// the shelf completes. The baseline (forward_only) places at once.
void plan_and_commit(ExecutionState& st, int agent, int shelf, bool forward_only);
void finish_carry(ExecutionState& st, int agent);

ExecutionResult run_crest(const Instance& inst, const ShelfPlan& plan,
                          const ExecutionConfig& cfg);

inline std::string crest_method_name(const ExecutionConfig& cfg) {
    if (cfg.use_str && cfg.use_ds && cfg.use_gtr) return "crest+all";
    std::string name = "crest";
    if (cfg.use_str) name += "+str";
    if (cfg.use_ds) name += "+ds";
    if (cfg.use_gtr) name += "+gtr";
    return name;
}

}  // namespace ddmapd
