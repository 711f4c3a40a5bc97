#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ddmapd/core.hpp"
#include "ddmapd/plan.hpp"

namespace ddmapd {

struct WaypointId {
    int shelf = -1;
    int index = -1;
    bool operator==(const WaypointId&) const = default;
};

// Inter-shelf precedence arc, tagged with the shared cell. The source is the
// earlier shelf's waypoint *after* the shared cell; the target is the later
// shelf's waypoint *at* it.
struct DepArc {
    WaypointId src;
    WaypointId dst;
    Vertex cell = -1;
    bool blocking = true;     // cleared by pruning and by strategy mutations
    bool validation = true;   // cleared by strategy mutations only
    bool operator==(const DepArc&) const = default;
};

struct DepSchedule {
    bool acyclic = false;
    int makespan = 0;
    // times[s][k]: traversal step of waypoint k (actual for traversed ones,
    // propagated estimate for the rest). Empty rows for length-1 shelves.
    std::vector<std::vector<int>> times;
};

// Precedence DAG over the waypoints of the simplified plan, with Type-1
// chain arcs kept implicit. Owns the simplified trajectories plus traversal
// bookkeeping so strategy mutations can snapshot/restore one value.
class DependencyGraph {
  public:
    DependencyGraph() = default;

    // Builds Type-2 arcs on the original timestep-indexed plan, then merges
    // repeated waypoints and re-anchors arcs to the merged nodes. The input
    // must already be validated collision-free and 1-robust.
    static DependencyGraph build(const ShelfPlan& unsimplified);

    // Reassembles a graph from stored parts (log loading); traversal marks
    // are left at the initial state.
    static DependencyGraph from_parts(std::vector<std::vector<Vertex>> waypoints,
                                      const std::vector<DepArc>& arcs);

    bool operator==(const DependencyGraph&) const = default;

    int num_shelves() const { return static_cast<int>(waypoints_.size()); }
    const std::vector<Vertex>& waypoints(int shelf) const {
        return waypoints_[static_cast<size_t>(shelf)];
    }
    int length(int shelf) const { return static_cast<int>(waypoints_[static_cast<size_t>(shelf)].size()); }
    ShelfPlan simplified_plan() const;

    // --- traversal state -------------------------------------------------
    bool traversed(int shelf, int index) const {
        return traversal_time_[static_cast<size_t>(shelf)][static_cast<size_t>(index)] >= 0;
    }
    int traversal_time(int shelf, int index) const {
        return traversal_time_[static_cast<size_t>(shelf)][static_cast<size_t>(index)];
    }
    void mark_traversed(int shelf, int index, int time);
    int next_untraversed(int shelf) const { return next_untraversed_[static_cast<size_t>(shelf)]; }
    int current_index(int shelf) const { return next_untraversed_[static_cast<size_t>(shelf)] - 1; }
    bool completed(int shelf) const {
        return next_untraversed_[static_cast<size_t>(shelf)] >= length(shelf);
    }
    Vertex current_cell(int shelf) const {
        return waypoints_[static_cast<size_t>(shelf)][static_cast<size_t>(current_index(shelf))];
    }

    // --- precedence queries ----------------------------------------------
    // True when the waypoint has a blocking in-arc whose source is untraversed.
    bool constrained_pending(int shelf, int index) const;
    // True when the waypoint has any blocking in-arc at all.
    bool constrained(int shelf, int index) const;
    // Release time of shelf's next waypoint: kInfTime while a blocking
    // predecessor is untraversed, otherwise max of the shelf path's end time
    // and the predecessors' passing times at the shared cells.
    int release_time(int shelf, int shelf_end_time) const;
    // Last index of the unconstrained segment starting at next_untraversed.
    int new_waypoint_index(int shelf) const;
    // Last index of the shelf's current static task (segments cut at every
    // shared location); used by the baseline executor.
    int task_end_index(int shelf) const;
    // Earliest step the waypoint may be entered given its satisfied arcs.
    int arrival_floor(int shelf, int index) const;

    bool is_acyclic() const;

    // Removes (un-blocks) Type-2 arcs whose source was traversed no later
    // than the earliest end time among all shelf paths.
    void prune_traversed_arcs(const std::vector<int>& shelf_end_times);

    // Earliest feasible traversal times assuming shelves advance one waypoint
    // per step on their own while respecting blocking arcs. Unassigned
    // shelves whose path ends before t_avail_min start at t_avail_min.
    DepSchedule schedule(const std::vector<char>& shelf_assigned,
                         const std::vector<int>& shelf_end_times, int t_avail_min) const;
    // schedule().makespan, as its own name.
    std::optional<int> estimate_makespan(const std::vector<char>& shelf_assigned,
                                         const std::vector<int>& shelf_end_times,
                                         int t_avail_min) const;

    // --- mutation (strategies) --------------------------------------------
    const std::vector<DepArc>& arcs() const { return arcs_; }
    std::vector<int> blocking_in_arcs(int shelf, int index) const;
    // Replaces arc a: src->dst with (dst.shelf, dst.index+1) -> (src.shelf,
    // src.index-1), keeping the cell tag. Returns false (graph untouched)
    // when the new target is already traversed or the new source would fall
    // past the end of its trajectory.
    bool reverse_arc(int arc_idx);
    // Replaces shelf's trajectory from its next untraversed waypoint onward
    // and rebuilds all arcs touching the shelf from the given visit times.
    // tail_times[i] is the absolute step of new waypoint next+i; other
    // shelves' visit times come from `other_times` (schedule-shaped, aligned
    // with their current waypoint lists).
    void replace_tail(int shelf, const std::vector<Vertex>& new_tail,
                      const std::vector<int>& tail_times,
                      const std::vector<std::vector<int>>& other_times);
    // Two-phase variant for replacing several trajectories at once: swap all
    // waypoint tails first, then rebuild each shelf's arcs against times
    // aligned with the final waypoint lists.
    void replace_tail_waypoints(int shelf, const std::vector<Vertex>& new_tail);
    void rebuild_arcs(int shelf, const std::vector<std::vector<int>>& all_times);

    // Deterministic DFS cycle probe; returns the Type-2 arc ids along the
    // first cycle found (chain arcs are implicit and irreversible).
    std::optional<std::vector<int>> find_cycle_arcs() const;

    std::string to_dot(const GridMap& map) const;

  private:
    void add_arc(const DepArc& arc);
    // arcs sorted out per node for queries
    std::vector<std::vector<Vertex>> waypoints_;
    std::vector<std::vector<int>> traversal_time_;  // -1 = untraversed
    std::vector<int> next_untraversed_;
    std::vector<DepArc> arcs_;
    std::vector<std::vector<std::vector<int>>> in_arcs_;   // [shelf][index] -> arc ids
    std::vector<std::vector<std::vector<int>>> out_arcs_;  // [shelf][index] -> arc ids
};

}  // namespace ddmapd
