#include "ddmapd/dependency_graph.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace ddmapd {

namespace {

struct Visit {
    int shelf;
    int index;      // simplified index at the cell
    int first;      // first step at the cell (actual or scheduled)
    bool traversed;
};

}  // namespace

DependencyGraph DependencyGraph::build(const ShelfPlan& unsimplified) {
    DependencyGraph g;
    const int M = unsimplified.num_shelves();
    g.waypoints_.resize(static_cast<size_t>(M));
    g.traversal_time_.resize(static_cast<size_t>(M));
    g.next_untraversed_.assign(static_cast<size_t>(M), 1);
    g.in_arcs_.resize(static_cast<size_t>(M));
    g.out_arcs_.resize(static_cast<size_t>(M));

    // Simplify, remembering each run's first original step.
    // visits_by_cell[v] -> all (shelf, simplified index, first step) runs at v.
    std::map<Vertex, std::vector<Visit>> visits_by_cell;
    for (int s = 0; s < M; ++s) {
        const auto& w = unsimplified.trajectories[static_cast<size_t>(s)].waypoints;
        auto& simp = g.waypoints_[static_cast<size_t>(s)];
        for (int k = 0; k < static_cast<int>(w.size()); ++k) {
            if (!simp.empty() && simp.back() == w[static_cast<size_t>(k)]) continue;
            simp.push_back(w[static_cast<size_t>(k)]);
            visits_by_cell[w[static_cast<size_t>(k)]].push_back(
                Visit{s, static_cast<int>(simp.size()) - 1, k, false});
        }
        g.traversal_time_[static_cast<size_t>(s)].assign(simp.size(), -1);
        g.traversal_time_[static_cast<size_t>(s)][0] = 0;  // shelf sits at its pickup
        g.in_arcs_[static_cast<size_t>(s)].resize(simp.size());
        g.out_arcs_[static_cast<size_t>(s)].resize(simp.size());
    }

    for (auto& [cell, visits] : visits_by_cell) {
        if (visits.size() < 2) continue;
        std::sort(visits.begin(), visits.end(),
                  [](const Visit& a, const Visit& b) { return a.first < b.first; });
        for (size_t i = 0; i < visits.size(); ++i) {
            for (size_t j = i + 1; j < visits.size(); ++j) {
                const Visit& early = visits[i];
                const Visit& late = visits[j];
                if (early.shelf == late.shelf) continue;  // chain handles revisits
                if (early.index + 1 >= g.length(early.shelf))
                    throw InvariantError("dependency build: shelf parks on a cell another shelf visits later");
                g.add_arc(DepArc{WaypointId{early.shelf, early.index + 1},
                                 WaypointId{late.shelf, late.index}, cell, true, true});
            }
        }
    }
    if (!g.is_acyclic())
        throw InvariantError("dependency build: cyclic graph from 1-robust plan");
    return g;
}

DependencyGraph DependencyGraph::from_parts(std::vector<std::vector<Vertex>> waypoints,
                                            const std::vector<DepArc>& arcs) {
    DependencyGraph g;
    const int M = static_cast<int>(waypoints.size());
    g.waypoints_ = std::move(waypoints);
    g.traversal_time_.resize(static_cast<size_t>(M));
    g.next_untraversed_.assign(static_cast<size_t>(M), 1);
    g.in_arcs_.resize(static_cast<size_t>(M));
    g.out_arcs_.resize(static_cast<size_t>(M));
    for (int s = 0; s < M; ++s) {
        const auto n = g.waypoints_[static_cast<size_t>(s)].size();
        g.traversal_time_[static_cast<size_t>(s)].assign(n, -1);
        if (n > 0) g.traversal_time_[static_cast<size_t>(s)][0] = 0;
        g.in_arcs_[static_cast<size_t>(s)].resize(n);
        g.out_arcs_[static_cast<size_t>(s)].resize(n);
    }
    for (const DepArc& a : arcs) g.add_arc(a);
    return g;
}

void DependencyGraph::add_arc(const DepArc& arc) {
    const int id = static_cast<int>(arcs_.size());
    arcs_.push_back(arc);
    in_arcs_[static_cast<size_t>(arc.dst.shelf)][static_cast<size_t>(arc.dst.index)].push_back(id);
    out_arcs_[static_cast<size_t>(arc.src.shelf)][static_cast<size_t>(arc.src.index)].push_back(id);
}

ShelfPlan DependencyGraph::simplified_plan() const {
    ShelfPlan plan;
    plan.simplified = true;
    for (int s = 0; s < num_shelves(); ++s)
        plan.trajectories.push_back(ShelfTrajectory{s, waypoints_[static_cast<size_t>(s)]});
    return plan;
}

void DependencyGraph::mark_traversed(int shelf, int index, int time) {
    auto& row = traversal_time_[static_cast<size_t>(shelf)];
    if (index != next_untraversed_[static_cast<size_t>(shelf)])
        throw InvariantError("mark_traversed out of order");
    row[static_cast<size_t>(index)] = time;
    next_untraversed_[static_cast<size_t>(shelf)] = index + 1;
}

bool DependencyGraph::constrained_pending(int shelf, int index) const {
    for (int id : in_arcs_[static_cast<size_t>(shelf)][static_cast<size_t>(index)]) {
        const DepArc& a = arcs_[static_cast<size_t>(id)];
        if (a.blocking && !traversed(a.src.shelf, a.src.index)) return true;
    }
    return false;
}

int DependencyGraph::release_time(int shelf, int shelf_end_time) const {
    const int next = next_untraversed_[static_cast<size_t>(shelf)];
    if (next >= length(shelf)) throw InvariantError("release_time on completed shelf");
    int rel = shelf_end_time;
    for (int id : in_arcs_[static_cast<size_t>(shelf)][static_cast<size_t>(next)]) {
        const DepArc& a = arcs_[static_cast<size_t>(id)];
        if (!a.blocking) continue;
        if (!traversed(a.src.shelf, a.src.index)) return kInfTime;
        // Passing time at the shared cell: when the predecessor shelf reached
        // it, i.e. the traversal time of the node one step before the source.
        rel = std::max(rel, traversal_time(a.src.shelf, a.src.index - 1));
    }
    return rel;
}

bool DependencyGraph::constrained(int shelf, int index) const {
    for (int id : in_arcs_[static_cast<size_t>(shelf)][static_cast<size_t>(index)])
        if (arcs_[static_cast<size_t>(id)].blocking) return true;
    return false;
}

int DependencyGraph::new_waypoint_index(int shelf) const {
    const int next = next_untraversed_[static_cast<size_t>(shelf)];
    const int len = length(shelf);
    for (int j = next; j < len; ++j)
        if (constrained_pending(shelf, j)) return j - 1;
    return len - 1;
}

int DependencyGraph::task_end_index(int shelf) const {
    // Static task granularity: trajectories are partitioned at shared
    // locations, so a task ends before the next waypoint that carries any
    // inter-shelf arc, satisfied or not.
    const int next = next_untraversed_[static_cast<size_t>(shelf)];
    const int len = length(shelf);
    if (constrained_pending(shelf, next)) return next - 1;
    for (int j = next + 1; j < len; ++j)
        for (int id : in_arcs_[static_cast<size_t>(shelf)][static_cast<size_t>(j)])
            if (arcs_[static_cast<size_t>(id)].validation) return j - 1;
    return len - 1;
}

int DependencyGraph::arrival_floor(int shelf, int index) const {
    // Satisfied arcs bound when the waypoint may be entered: strictly after
    // each predecessor shelf reached the shared cell. Together with the
    // reservation table this keeps traversal order consistent with every
    // arc even across a single long carry.
    int floor = 0;
    for (int id : in_arcs_[static_cast<size_t>(shelf)][static_cast<size_t>(index)]) {
        const DepArc& a = arcs_[static_cast<size_t>(id)];
        if (!a.blocking) continue;
        if (!traversed(a.src.shelf, a.src.index))
            throw InvariantError("arrival_floor on a waypoint with pending arcs");
        floor = std::max(floor, traversal_time(a.src.shelf, a.src.index - 1) + 1);
    }
    return floor;
}

bool DependencyGraph::is_acyclic() const {
    // Kahn over chain + blocking arcs.
    const int M = num_shelves();
    std::vector<std::vector<int>> indeg(static_cast<size_t>(M));
    std::vector<std::pair<int, int>> queue;
    int total = 0;
    for (int s = 0; s < M; ++s) {
        indeg[static_cast<size_t>(s)].assign(static_cast<size_t>(length(s)), 0);
        total += length(s);
    }
    for (const DepArc& a : arcs_)
        if (a.blocking) ++indeg[static_cast<size_t>(a.dst.shelf)][static_cast<size_t>(a.dst.index)];
    for (int s = 0; s < M; ++s) {
        for (int k = 1; k < length(s); ++k) ++indeg[static_cast<size_t>(s)][static_cast<size_t>(k)];
        if (indeg[static_cast<size_t>(s)][0] == 0) queue.emplace_back(s, 0);
    }
    int seen = 0;
    std::vector<std::pair<int, int>> next_queue;
    while (!queue.empty()) {
        auto [s, k] = queue.back();
        queue.pop_back();
        ++seen;
        auto relax = [&](int s2, int k2) {
            if (--indeg[static_cast<size_t>(s2)][static_cast<size_t>(k2)] == 0)
                queue.emplace_back(s2, k2);
        };
        if (k + 1 < length(s)) relax(s, k + 1);
        for (int id : out_arcs_[static_cast<size_t>(s)][static_cast<size_t>(k)]) {
            const DepArc& a = arcs_[static_cast<size_t>(id)];
            if (a.blocking) relax(a.dst.shelf, a.dst.index);
        }
    }
    return seen == total;
}

void DependencyGraph::prune_traversed_arcs(const std::vector<int>& shelf_end_times) {
    int t_star = kInfTime;
    for (int e : shelf_end_times) t_star = std::min(t_star, e);
    for (DepArc& a : arcs_) {
        if (!a.blocking) continue;
        if (traversed(a.src.shelf, a.src.index) &&
            traversal_time(a.src.shelf, a.src.index) <= t_star)
            a.blocking = false;
    }
}

DepSchedule DependencyGraph::schedule(const std::vector<char>& shelf_assigned,
                                      const std::vector<int>& shelf_end_times,
                                      int t_avail_min) const {
    const int M = num_shelves();
    DepSchedule out;
    out.times.resize(static_cast<size_t>(M));
    std::vector<std::vector<int>> indeg(static_cast<size_t>(M));
    int untraversed_total = 0;
    for (int s = 0; s < M; ++s) {
        out.times[static_cast<size_t>(s)] = traversal_time_[static_cast<size_t>(s)];
        indeg[static_cast<size_t>(s)].assign(static_cast<size_t>(length(s)), 0);
    }
    // In-degrees over untraversed nodes only (traversed predecessors have
    // known times and impose no ordering work).
    for (const DepArc& a : arcs_) {
        if (!a.blocking) continue;
        if (traversed(a.dst.shelf, a.dst.index)) continue;
        if (!traversed(a.src.shelf, a.src.index))
            ++indeg[static_cast<size_t>(a.dst.shelf)][static_cast<size_t>(a.dst.index)];
    }
    std::vector<std::pair<int, int>> queue;
    for (int s = 0; s < M; ++s) {
        const int next = next_untraversed_[static_cast<size_t>(s)];
        for (int k = next + 1; k < length(s); ++k)
            ++indeg[static_cast<size_t>(s)][static_cast<size_t>(k)];
        untraversed_total += length(s) - next;
        if (next < length(s) && indeg[static_cast<size_t>(s)][static_cast<size_t>(next)] == 0)
            queue.emplace_back(s, next);
    }
    int processed = 0;
    while (!queue.empty()) {
        auto [s, k] = queue.back();
        queue.pop_back();
        ++processed;
        const int end_s = shelf_end_times[static_cast<size_t>(s)];
        const bool clamp = !shelf_assigned[static_cast<size_t>(s)] && end_s < t_avail_min;
        const int start_s = clamp ? t_avail_min : end_s;
        int t;
        if (k == next_untraversed_[static_cast<size_t>(s)])
            // Reached at the start time, but never sooner than one step past
            // the committed path (so schedules materialize move-by-move).
            t = std::max(start_s, end_s + 1);
        else
            t = out.times[static_cast<size_t>(s)][static_cast<size_t>(k - 1)] + 1;
        for (int id : in_arcs_[static_cast<size_t>(s)][static_cast<size_t>(k)]) {
            const DepArc& a = arcs_[static_cast<size_t>(id)];
            if (!a.blocking) continue;
            t = std::max(t, out.times[static_cast<size_t>(a.src.shelf)][static_cast<size_t>(a.src.index)]);
        }
        out.times[static_cast<size_t>(s)][static_cast<size_t>(k)] = t;
        auto relax = [&](int s2, int k2) {
            if (traversed(s2, k2)) return;
            if (--indeg[static_cast<size_t>(s2)][static_cast<size_t>(k2)] == 0)
                queue.emplace_back(s2, k2);
        };
        if (k + 1 < length(s)) relax(s, k + 1);
        for (int id : out_arcs_[static_cast<size_t>(s)][static_cast<size_t>(k)]) {
            const DepArc& a = arcs_[static_cast<size_t>(id)];
            if (a.blocking) relax(a.dst.shelf, a.dst.index);
        }
    }
    out.acyclic = processed == untraversed_total;
    out.makespan = 0;
    if (out.acyclic)
        for (int s = 0; s < M; ++s) {
            if (length(s) == 0) continue;
            if (completed(s))
                out.makespan = std::max(out.makespan, shelf_end_times[static_cast<size_t>(s)]);
            else
                out.makespan = std::max(
                    out.makespan, out.times[static_cast<size_t>(s)][static_cast<size_t>(length(s) - 1)]);
        }
    return out;
}

std::optional<int> DependencyGraph::estimate_makespan(const std::vector<char>& shelf_assigned,
                                                      const std::vector<int>& shelf_end_times,
                                                      int t_avail_min) const {
    const DepSchedule sch = schedule(shelf_assigned, shelf_end_times, t_avail_min);
    if (!sch.acyclic) return std::nullopt;
    return sch.makespan;
}

std::vector<int> DependencyGraph::blocking_in_arcs(int shelf, int index) const {
    std::vector<int> out;
    for (int id : in_arcs_[static_cast<size_t>(shelf)][static_cast<size_t>(index)])
        if (arcs_[static_cast<size_t>(id)].blocking) out.push_back(id);
    return out;
}

bool DependencyGraph::reverse_arc(int arc_idx) {
    DepArc& a = arcs_[static_cast<size_t>(arc_idx)];
    if (!a.blocking) throw InvariantError("reverse_arc on dead arc");
    const WaypointId new_src{a.dst.shelf, a.dst.index + 1};
    const WaypointId new_dst{a.src.shelf, a.src.index - 1};
    if (new_src.index >= length(new_src.shelf)) return false;  // target parks on the cell
    if (traversed(new_dst.shelf, new_dst.index)) return false;
    a.blocking = false;
    a.validation = false;
    add_arc(DepArc{new_src, new_dst, a.cell, true, true});
    return true;
}

void DependencyGraph::replace_tail_waypoints(int shelf, const std::vector<Vertex>& new_tail) {
    const int next = next_untraversed_[static_cast<size_t>(shelf)];

    // Drop every arc touching the shelf and compact the arc storage.
    for (DepArc& a : arcs_)
        if (a.src.shelf == shelf || a.dst.shelf == shelf) {
            a.blocking = false;
            a.validation = false;
        }
    auto& wp = waypoints_[static_cast<size_t>(shelf)];
    wp.resize(static_cast<size_t>(next));
    for (Vertex v : new_tail) wp.push_back(v);
    auto& tt = traversal_time_[static_cast<size_t>(shelf)];
    tt.resize(static_cast<size_t>(next));
    tt.resize(wp.size(), -1);

    std::vector<DepArc> kept;
    kept.reserve(arcs_.size());
    for (const DepArc& a : arcs_)
        if (a.blocking || a.validation) kept.push_back(a);
    arcs_.clear();
    for (int s = 0; s < num_shelves(); ++s) {
        in_arcs_[static_cast<size_t>(s)].assign(waypoints_[static_cast<size_t>(s)].size(), {});
        out_arcs_[static_cast<size_t>(s)].assign(waypoints_[static_cast<size_t>(s)].size(), {});
    }
    for (const DepArc& a : kept) add_arc(a);
}

void DependencyGraph::rebuild_arcs(int shelf, const std::vector<std::vector<int>>& all_times) {
    const int next = next_untraversed_[static_cast<size_t>(shelf)];
    const auto& wp = waypoints_[static_cast<size_t>(shelf)];
    const auto& my_times = all_times[static_cast<size_t>(shelf)];
    for (int s = 0; s < num_shelves(); ++s) {
        if (s == shelf) continue;
        const auto& ow = waypoints_[static_cast<size_t>(s)];
        for (int j = 0; j < static_cast<int>(ow.size()); ++j) {
            for (int k = 0; k < static_cast<int>(wp.size()); ++k) {
                if (ow[static_cast<size_t>(j)] != wp[static_cast<size_t>(k)]) continue;
                const Vertex v = wp[static_cast<size_t>(k)];
                const bool mine_trav = k < next;
                const bool other_trav = traversed(s, j);
                if (mine_trav && other_trav) continue;  // committed history on both sides
                bool mine_first;
                if (mine_trav != other_trav) {
                    // The committed visit comes first. When the other shelf
                    // is still sitting at v, the arc from its departure node
                    // gates our visit until it leaves.
                    mine_first = mine_trav;
                } else {
                    const int tm = my_times[static_cast<size_t>(k)];
                    const int to = all_times[static_cast<size_t>(s)][static_cast<size_t>(j)];
                    mine_first = tm != to ? tm < to : shelf < s;
                }
                const int es = mine_first ? shelf : s;
                const int ei = mine_first ? k : j;
                const int ls = mine_first ? s : shelf;
                const int li = mine_first ? j : k;
                if (ei + 1 >= length(es))
                    throw InvariantError("rebuild_arcs: route crosses a permanently parked shelf");
                // The symmetric rebuild for the other shelf would duplicate
                // this pair; drop any arc already covering it.
                bool duplicate = false;
                for (int id : in_arcs_[static_cast<size_t>(ls)][static_cast<size_t>(li)]) {
                    const DepArc& a = arcs_[static_cast<size_t>(id)];
                    if (a.blocking && a.src.shelf == es && a.src.index == ei + 1 && a.cell == v)
                        duplicate = true;
                }
                if (!duplicate)
                    add_arc(DepArc{WaypointId{es, ei + 1}, WaypointId{ls, li}, v, true, true});
            }
        }
    }
}

void DependencyGraph::replace_tail(int shelf, const std::vector<Vertex>& new_tail,
                                   const std::vector<int>& tail_times,
                                   const std::vector<std::vector<int>>& other_times) {
    const int next = next_untraversed_[static_cast<size_t>(shelf)];
    if (new_tail.size() != tail_times.size())
        throw InvariantError("replace_tail: tail/times size mismatch");
    replace_tail_waypoints(shelf, new_tail);
    std::vector<std::vector<int>> all_times = other_times;
    auto& mine = all_times[static_cast<size_t>(shelf)];
    mine = traversal_time_[static_cast<size_t>(shelf)];
    for (size_t i = 0; i < tail_times.size(); ++i)
        mine[static_cast<size_t>(next) + i] = tail_times[i];
    rebuild_arcs(shelf, all_times);
}

std::optional<std::vector<int>> DependencyGraph::find_cycle_arcs() const {
    const int M = num_shelves();
    // colors: 0 unvisited, 1 on stack, 2 done
    std::vector<std::vector<char>> color(static_cast<size_t>(M));
    for (int s = 0; s < M; ++s) color[static_cast<size_t>(s)].assign(static_cast<size_t>(length(s)), 0);

    struct Frame {
        int shelf, index;
        int edge = -1;   // -1: chain edge next; >=0: position in out_arcs list
        int via_arc;     // arc id used to enter this node, -1 for chain/root
    };
    std::vector<Frame> stack;

    auto run_from = [&](int s0, int k0) -> std::optional<std::vector<int>> {
        stack.clear();
        stack.push_back(Frame{s0, k0, -1, -1});
        color[static_cast<size_t>(s0)][static_cast<size_t>(k0)] = 1;
        while (!stack.empty()) {
            Frame& f = stack.back();
            const auto& outs = out_arcs_[static_cast<size_t>(f.shelf)][static_cast<size_t>(f.index)];
            int ns = -1, nk = -1, via = -1;
            while (true) {
                if (f.edge == -1) {
                    f.edge = 0;
                    if (f.index + 1 < length(f.shelf)) {
                        ns = f.shelf;
                        nk = f.index + 1;
                        via = -1;
                        break;
                    }
                    continue;
                }
                if (f.edge >= static_cast<int>(outs.size())) break;
                const int id = outs[static_cast<size_t>(f.edge++)];
                const DepArc& a = arcs_[static_cast<size_t>(id)];
                if (!a.blocking) continue;
                ns = a.dst.shelf;
                nk = a.dst.index;
                via = id;
                break;
            }
            if (ns < 0) {
                color[static_cast<size_t>(f.shelf)][static_cast<size_t>(f.index)] = 2;
                stack.pop_back();
                continue;
            }
            const char c = color[static_cast<size_t>(ns)][static_cast<size_t>(nk)];
            if (c == 1) {
                // Back edge closes a cycle through the stack segment
                // [start..top]; report its Type-2 arcs (chain edges enter
                // frames with via_arc == -1).
                size_t start = stack.size();
                while (start > 0 &&
                       !(stack[start - 1].shelf == ns && stack[start - 1].index == nk))
                    --start;
                std::vector<int> cycle_arcs;
                for (size_t j = start; j < stack.size(); ++j)
                    if (stack[j].via_arc >= 0) cycle_arcs.push_back(stack[j].via_arc);
                if (via >= 0) cycle_arcs.push_back(via);
                return cycle_arcs;
            }
            if (c == 0) {
                color[static_cast<size_t>(ns)][static_cast<size_t>(nk)] = 1;
                stack.push_back(Frame{ns, nk, -1, via});
            }
        }
        return std::nullopt;
    };

    for (int s = 0; s < M; ++s)
        for (int k = 0; k < length(s); ++k)
            if (color[static_cast<size_t>(s)][static_cast<size_t>(k)] == 0)
                if (auto cyc = run_from(s, k)) return cyc;
    return std::nullopt;
}

std::string DependencyGraph::to_dot(const GridMap& map) const {
    std::ostringstream os;
    os << "digraph dep {\n  rankdir=LR;\n";
    for (int s = 0; s < num_shelves(); ++s) {
        for (int k = 0; k < length(s); ++k) {
            const Cell c = map.to_cell(waypoints_[static_cast<size_t>(s)][static_cast<size_t>(k)]);
            os << "  \"s" << s << ":" << k << "\" [label=\"s" << s << ":" << k << "@(" << c.row
               << "," << c.col << ")\"];\n";
        }
        for (int k = 0; k + 1 < length(s); ++k)
            os << "  \"s" << s << ":" << k << "\" -> \"s" << s << ":" << k + 1
               << "\" [style=solid];\n";
    }
    for (const DepArc& a : arcs_) {
        if (!a.blocking) continue;
        os << "  \"s" << a.src.shelf << ":" << a.src.index << "\" -> \"s" << a.dst.shelf << ":"
           << a.dst.index << "\" [style=dashed];\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace ddmapd
