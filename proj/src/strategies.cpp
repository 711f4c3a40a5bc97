#include "ddmapd/strategies.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

namespace ddmapd {

namespace {

// Time-expanded occupancy of reconstructed timelines, excluding one shelf.
struct TimelineGrid {
    int cells = 0;
    int horizon = 0;
    std::vector<int> occupant;  // [(t * cells) + cell] -> shelf id or -1

    TimelineGrid(const std::vector<std::vector<Vertex>>& timelines, int skip, int cell_count,
                 int H)
        : cells(cell_count), horizon(H), occupant(static_cast<size_t>(cell_count) * (H + 1), -1) {
        for (int s = 0; s < static_cast<int>(timelines.size()); ++s) {
            if (s == skip) continue;
            const auto& tl = timelines[static_cast<size_t>(s)];
            for (int t = 0; t <= H; ++t)
                occupant[static_cast<size_t>(t) * cells +
                         static_cast<size_t>(tl[static_cast<size_t>(t)])] = s;
        }
    }
    int at(Vertex v, int t) const {
        return occupant[static_cast<size_t>(t) * cells + static_cast<size_t>(v)];
    }
};

struct ReconSearch {
    const GridMap& map;
    const TimelineGrid& grid;
    const std::unordered_set<Vertex>& forbidden;  // agent initial cells
    // Cells where a completed shelf parks forever: crossing them "before"
    // the park on the virtual axis would be unexecutable.
    const std::unordered_set<Vertex>* parked = nullptr;
    Vertex avoid_cell = -1;
    int avoid_before = 0;
    int start_t = 0;
    Vertex start = -1;
    Vertex goal = -1;

    bool allowed(Vertex from, Vertex to, int t_arrive) const {
        if (forbidden.count(to)) return false;
        if (parked && parked->count(to)) return false;
        if (to == avoid_cell && t_arrive < avoid_before) return false;
        if (grid.at(to, t_arrive) >= 0) return false;
        if (from != to) {
            const int o = grid.at(to, t_arrive - 1);
            if (o >= 0 && grid.at(from, t_arrive) == o) return false;  // swap
        }
        return true;
    }

    // Positions from start_t to the arrival step, or nullopt. Objective:
    // earliest arrival at the goal (with a collision-free park), then the
    // fewest moves (waits trade freely against nothing in cost), then a
    // greedy preference for cells no other trajectory has visited earlier,
    // then lexicographic cells.
    std::optional<std::vector<Vertex>> run(bool prefer_clean) const;
};

std::optional<std::vector<Vertex>> ReconSearch::run(bool prefer_clean) const {
    const int H = grid.horizon;
    const int C = grid.cells;
    if (start_t > H) return std::nullopt;
    const size_t layers = static_cast<size_t>(H - start_t + 1);
    auto idx = [&](int t, Vertex v) {
        return static_cast<size_t>(t - start_t) * C + static_cast<size_t>(v);
    };

    // Forward min-move table (waits are free).
    std::vector<int> fmoves(layers * static_cast<size_t>(C), kInfTime);
    fmoves[idx(start_t, start)] = 0;
    std::array<Vertex, 4> nb;
    for (int t = start_t; t < H; ++t) {
        for (Vertex v = 0; v < C; ++v) {
            const int m = fmoves[idx(t, v)];
            if (m >= kInfTime) continue;
            if (allowed(v, v, t + 1)) fmoves[idx(t + 1, v)] = std::min(fmoves[idx(t + 1, v)], m);
            const int n = map.neighbors(v, nb);
            for (int i = 0; i < n; ++i) {
                const Vertex u = nb[static_cast<size_t>(i)];
                if (allowed(v, u, t + 1)) fmoves[idx(t + 1, u)] = std::min(fmoves[idx(t + 1, u)], m + 1);
            }
        }
    }

    // Last step any other timeline touches the goal (for parking forever).
    int last_goal_visit = -1;
    for (int t = 0; t <= H; ++t)
        if (grid.at(goal, t) >= 0) last_goal_visit = t;
    if (grid.at(goal, H) >= 0) return std::nullopt;  // someone parks there

    int arrival = -1;
    for (int t = start_t; t <= H; ++t) {
        if (fmoves[idx(t, goal)] >= kInfTime) continue;
        if (last_goal_visit > t) continue;  // parking would collide later
        arrival = t;
        break;
    }
    if (arrival < 0) return std::nullopt;

    // Backward min-move table from (goal, arrival).
    std::vector<int> bmoves(layers * static_cast<size_t>(C), kInfTime);
    bmoves[idx(arrival, goal)] = 0;
    for (int t = arrival - 1; t >= start_t; --t) {
        for (Vertex v = 0; v < C; ++v) {
            int best = kInfTime;
            if (allowed(v, v, t + 1)) best = std::min(best, bmoves[idx(t + 1, v)]);
            const int n = map.neighbors(v, nb);
            for (int i = 0; i < n; ++i) {
                const Vertex u = nb[static_cast<size_t>(i)];
                if (allowed(v, u, t + 1) && bmoves[idx(t + 1, u)] < kInfTime)
                    best = std::min(best, bmoves[idx(t + 1, u)] + 1);
            }
            bmoves[idx(t, v)] = best;
        }
    }
    const int total_moves = bmoves[idx(start_t, start)];
    if (total_moves >= kInfTime) return std::nullopt;

    std::vector<int> first_other;
    if (prefer_clean) {
        first_other.assign(static_cast<size_t>(C), kInfTime);
        for (int t = 0; t <= H; ++t)
            for (Vertex v = 0; v < C; ++v)
                if (grid.at(v, t) >= 0 && first_other[static_cast<size_t>(v)] >= kInfTime)
                    first_other[static_cast<size_t>(v)] = t;
    }

    // Deterministic walk along move-optimal corridors; prefer still-clean
    // cells, then lexicographically smaller ones.
    std::vector<Vertex> path;
    path.push_back(start);
    Vertex cur = start;
    int used = 0;
    bool still_clean = prefer_clean && first_other[static_cast<size_t>(start)] >= start_t;
    for (int t = start_t; t < arrival; ++t) {
        Vertex pick = -1;
        int pick_cost = 0;
        bool pick_clean = false;
        auto consider = [&](Vertex u, int cost) {
            if (!allowed(cur, u, t + 1)) return;
            const int bm = bmoves[idx(t + 1, u)];
            if (bm >= kInfTime || used + cost + bm > total_moves) return;
            const bool uclean =
                still_clean && prefer_clean && first_other[static_cast<size_t>(u)] >= t + 1;
            if (pick < 0 || (uclean && !pick_clean) ||
                (uclean == pick_clean && u < pick)) {
                pick = u;
                pick_cost = cost;
                pick_clean = uclean;
            }
        };
        consider(cur, 0);
        const int n = map.neighbors(cur, nb);
        for (int i = 0; i < n; ++i) consider(nb[static_cast<size_t>(i)], 1);
        if (pick < 0) return std::nullopt;  // unreachable by construction
        path.push_back(pick);
        used += pick_cost;
        cur = pick;
        still_clean = still_clean && pick_clean;
    }
    return path;
}

// Collapse a timed position path into (cells, first-visit times) runs,
// dropping the leading run at the current waypoint.
void path_to_tail(const std::vector<Vertex>& path, int start_t, std::vector<Vertex>& tail,
                  std::vector<int>& tail_times) {
    tail.clear();
    tail_times.clear();
    for (size_t i = 0; i < path.size(); ++i) {
        if (i > 0 && path[i] == path[i - 1]) continue;
        if (i == 0) continue;  // leading run stays part of the traversed prefix
        tail.push_back(path[i]);
        tail_times.push_back(start_t + static_cast<int>(i));
    }
}

std::unordered_set<Vertex> start_cells(const ExecutionState& st) {
    return std::unordered_set<Vertex>(st.inst->agent_starts.begin(), st.inst->agent_starts.end());
}

// Delivery cells of completed shelves, occupied for the rest of the run.
std::unordered_set<Vertex> parked_cells(const ExecutionState& st, int skip_shelf) {
    std::unordered_set<Vertex> out;
    for (int s = 0; s < st.num_shelves(); ++s)
        if (s != skip_shelf && st.dep.completed(s)) out.insert(st.dep.current_cell(s));
    return out;
}

}  // namespace

Reconstruction extract_mapf(const ExecutionState& st) {
    Reconstruction rec;
    rec.t_avail_min = st.t_avail_min();
    const auto assigned = st.shelf_assigned_flags();
    const auto ends = st.shelf_end_times();
    rec.schedule = st.dep.schedule(assigned, ends, rec.t_avail_min);
    if (!rec.schedule.acyclic) throw InvariantError("extract_mapf on a cyclic dependency graph");

    int max_end = 0;
    for (int a = 0; a < st.num_agents(); ++a) max_end = std::max(max_end, st.t_avail(a));
    int untraversed = 0;
    for (int s = 0; s < st.num_shelves(); ++s) {
        max_end = std::max(max_end, ends[static_cast<size_t>(s)]);
        untraversed += st.dep.length(s) - st.dep.next_untraversed(s);
    }
    rec.horizon = std::max(max_end + untraversed + st.num_agents(), rec.schedule.makespan) + 1;

    rec.pos.resize(static_cast<size_t>(st.num_shelves()));
    for (int s = 0; s < st.num_shelves(); ++s) {
        auto& pos = rec.pos[static_cast<size_t>(s)];
        pos.resize(static_cast<size_t>(rec.horizon) + 1);
        const auto& committed = st.shelf_paths[static_cast<size_t>(s)];
        const int end_s = ends[static_cast<size_t>(s)];
        for (int t = 0; t <= std::min(end_s, rec.horizon); ++t)
            pos[static_cast<size_t>(t)] = committed[static_cast<size_t>(t)];
        int k = st.dep.next_untraversed(s);
        Vertex cur = st.dep.waypoints(s)[static_cast<size_t>(k - 1 >= 0 ? k - 1 : 0)];
        const auto& times = rec.schedule.times[static_cast<size_t>(s)];
        for (int t = end_s + 1; t <= rec.horizon; ++t) {
            if (k < st.dep.length(s) && times[static_cast<size_t>(k)] <= t) {
                cur = st.dep.waypoints(s)[static_cast<size_t>(k)];
                ++k;
            }
            pos[static_cast<size_t>(t)] = cur;
        }
    }
    return rec;
}

bool single_replan(int shelf, ExecutionState& st) {
    ++st.audit.str_attempts;
    const DependencyGraph snapshot = st.dep;
    auto reject = [&]() {
        if (!(st.dep == snapshot)) st.dep = snapshot;  // transactional rollback
        return false;
    };

    if (st.dep.completed(shelf)) return reject();
    const Reconstruction rec = extract_mapf(st);
    const std::unordered_set<Vertex> forbidden = start_cells(st);
    const std::unordered_set<Vertex> parked = parked_cells(st, shelf);
    const TimelineGrid grid(rec.pos, shelf, st.inst->map.size(), rec.horizon);

    ReconSearch search{st.inst->map, grid, forbidden, &parked};
    search.start = st.dep.current_cell(shelf);
    search.start_t = st.shelf_end(shelf);
    search.goal = st.inst->shelves[static_cast<size_t>(shelf)].delivery;
    const auto path = search.run(/*prefer_clean=*/getenv("DDMAPD_STR_NOCLEAN") ? false : true);
    if (!path) return reject();

    std::vector<Vertex> tail;
    std::vector<int> tail_times;
    path_to_tail(*path, search.start_t, tail, tail_times);
    if (tail.empty()) return reject();

    st.dep.replace_tail(shelf, tail, tail_times, rec.schedule.times);
    // The caller commits a carry right after; a tail whose first waypoint is
    // still gated would stall the shelf this replan was meant to free.
    if (!st.dep.is_acyclic() ||
        st.dep.constrained_pending(shelf, st.dep.next_untraversed(shelf)))
        return reject();
    ++st.audit.str_accepted;
    return true;
}

namespace {

// Budget on recursion nodes: cycles can carry many Type-2 arcs and the
// branching is exponential in the depth limit otherwise.
constexpr int kDsNodeBudget = 512;

bool ds_resolve(DependencyGraph& g, const std::vector<char>& assigned,
                const std::vector<int>& ends, int t_avail_min, long long baseline, int depth,
                int depth_limit, int& budget) {
    if (--budget < 0) return false;
    const auto cyc = g.find_cycle_arcs();
    if (!cyc) {
        const auto est = g.estimate_makespan(assigned, ends, t_avail_min);
        return est && *est <= baseline;
    }
    if (depth >= depth_limit) return false;
    for (int arc_id : *cyc) {
        DependencyGraph branch = g;
        if (!branch.reverse_arc(arc_id)) continue;
        if (ds_resolve(branch, assigned, ends, t_avail_min, baseline, depth + 1, depth_limit,
                       budget)) {
            g = std::move(branch);
            return true;
        }
    }
    return false;
}

}  // namespace

bool dep_switch(int shelf, ExecutionState& st) {
    ++st.audit.ds_attempts;
    const auto assigned = st.shelf_assigned_flags();
    const auto ends = st.shelf_end_times();
    const int t_avail_min = st.t_avail_min();
    const auto baseline = st.dep.estimate_makespan(assigned, ends, t_avail_min);
    if (!baseline) return false;

    DependencyGraph work = st.dep;
    const int next = work.next_untraversed(shelf);
    const std::vector<int> pending = work.blocking_in_arcs(shelf, next);
    bool any = false;
    for (int id : pending) {
        const DepArc& a = work.arcs()[static_cast<size_t>(id)];
        if (work.traversed(a.src.shelf, a.src.index)) continue;  // satisfied, keep
        if (!work.reverse_arc(id)) return false;
        any = true;
    }
    if (!any) return false;
    int budget = kDsNodeBudget;
    if (!ds_resolve(work, assigned, ends, t_avail_min, *baseline, 0, st.cfg.ds_depth_limit,
                    budget))
        return false;
    // A recursed reversal may have re-blocked the waypoint this switch was
    // meant to release; that defeats the continued carry.
    if (work.constrained_pending(shelf, next)) return false;

    const auto est = work.estimate_makespan(assigned, ends, t_avail_min);
    if (!est || *est > *baseline) {
        ++st.audit.makespan_regressions;  // ds_resolve should have enforced this
        return false;
    }
    st.dep = std::move(work);
    ++st.audit.ds_accepted;
    return true;
}

bool group_replan(int shelf, ExecutionState& st) {
    ++st.audit.gtr_attempts;
    const DependencyGraph snapshot = st.dep;
    auto reject = [&]() {
        if (!(st.dep == snapshot)) st.dep = snapshot;  // transactional rollback
        return false;
    };

    const int next = st.dep.next_untraversed(shelf);
    const Vertex wcell = st.dep.waypoints(shelf)[static_cast<size_t>(next)];
    std::set<int> constraining;
    for (int id : st.dep.blocking_in_arcs(shelf, next)) {
        const DepArc& a = st.dep.arcs()[static_cast<size_t>(id)];
        if (st.dep.traversed(a.src.shelf, a.src.index)) continue;
        if (st.shelf_assigned_to[static_cast<size_t>(a.src.shelf)] >= 0) return reject();
        if (st.dep.traversed(a.src.shelf, a.src.index - 1)) return reject();  // parked at the cell
        constraining.insert(a.src.shelf);
    }
    if (constraining.empty()) return reject();

    const Reconstruction rec = extract_mapf(st);
    const auto assigned = st.shelf_assigned_flags();
    const auto ends = st.shelf_end_times();
    const long long baseline = rec.schedule.makespan;
    const int k = rec.schedule.times[static_cast<size_t>(shelf)][static_cast<size_t>(next)];
    const std::unordered_set<Vertex> forbidden = start_cells(st);

    std::vector<std::vector<Vertex>> timelines = rec.pos;
    std::vector<std::vector<int>> times_work = rec.schedule.times;
    struct Tail {
        int shelf;
        std::vector<Vertex> cells;
        std::vector<int> times;
    };
    std::vector<Tail> tails;

    for (int s2 : constraining) {
        const TimelineGrid grid(timelines, s2, st.inst->map.size(), rec.horizon);
        const std::unordered_set<Vertex> parked = parked_cells(st, s2);
        ReconSearch search{st.inst->map, grid, forbidden, &parked};
        search.start = st.dep.current_cell(s2);
        search.start_t = std::max(st.shelf_end(s2), rec.t_avail_min);
        search.goal = st.inst->shelves[static_cast<size_t>(s2)].delivery;
        search.avoid_cell = wcell;
        search.avoid_before = k;
        const auto path = search.run(/*prefer_clean=*/false);
        if (!path) return reject();
        const int arrival = search.start_t + static_cast<int>(path->size()) - 1;
        const int old_arrival =
            rec.schedule.times[static_cast<size_t>(s2)][static_cast<size_t>(st.dep.length(s2) - 1)];
        if (arrival > old_arrival) return reject();

        Tail tail;
        tail.shelf = s2;
        path_to_tail(*path, search.start_t, tail.cells, tail.times);
        if (tail.cells.empty()) return reject();
        tails.push_back(tail);

        // Update the working timeline and times for subsequent replans.
        auto& tl = timelines[static_cast<size_t>(s2)];
        for (int t = search.start_t; t <= rec.horizon; ++t) {
            const int i = t - search.start_t;
            tl[static_cast<size_t>(t)] =
                i < static_cast<int>(path->size()) ? (*path)[static_cast<size_t>(i)] : path->back();
        }
        auto& tw = times_work[static_cast<size_t>(s2)];
        tw.resize(static_cast<size_t>(st.dep.next_untraversed(s2)));
        for (int t2 : tail.times) tw.push_back(t2);
    }

    // Swap all trajectories first, then rebuild arcs against the final
    // waypoint lists so no pairing mixes old waypoints with new times.
    for (const Tail& t : tails) st.dep.replace_tail_waypoints(t.shelf, t.cells);
    for (const Tail& t : tails) st.dep.rebuild_arcs(t.shelf, times_work);
    if (!st.dep.is_acyclic()) return reject();
    const auto est = st.dep.estimate_makespan(assigned, ends, st.t_avail_min());
    if (!est || *est > baseline) return reject();
    ++st.audit.gtr_accepted;
    return true;
}

}  // namespace ddmapd
