#include "ddmapd/validator.hpp"

#include <algorithm>
#include <sstream>

namespace ddmapd {

namespace {

Vertex padded(const std::vector<Vertex>& p, int t) {
    const int n = static_cast<int>(p.size());
    if (n == 0) return -1;
    return p[static_cast<size_t>(std::min(t, n - 1))];
}

struct CarryWindow {
    int agent = -1;
    int lift_time = 0;   // lift window [lift_time, lift_time + delta]
    int place_time = -1; // place window [place_time, place_time + delta]
};

}  // namespace

std::string ExecValidity::describe() const {
    std::ostringstream os;
    for (const auto& v : violations) os << v << '\n';
    return os.str();
}

ExecValidity validate_execution(const ExecutionResult& result, const Instance& inst) {
    ExecValidity out;
    auto flag = [&out](const std::string& s) {
        if (out.violations.size() < 64) out.violations.push_back(s);
    };
    const GridMap& map = inst.map;
    const int N = static_cast<int>(result.agent_paths.size());
    const int M = static_cast<int>(result.shelf_paths.size());
    if (N != inst.num_agents() || M != inst.num_shelves()) {
        flag("path count mismatch with instance");
        return out;
    }
    const int delta = result.overhead_delta;

    // Full walked agent timelines: committed path plus any leftover dummy.
    std::vector<std::vector<Vertex>> walked(static_cast<size_t>(N));
    for (int a = 0; a < N; ++a) {
        walked[static_cast<size_t>(a)] = result.agent_paths[static_cast<size_t>(a)];
        if (a < static_cast<int>(result.leftover_dummies.size())) {
            const TimedPath& d = result.leftover_dummies[static_cast<size_t>(a)];
            if (!d.empty()) {
                auto& w = walked[static_cast<size_t>(a)];
                if (d.t0 != static_cast<int>(w.size()) - 1 || d.cells.front() != w.back())
                    flag("agent " + std::to_string(a) + ": dummy does not continue its path");
                for (size_t i = 1; i < d.cells.size(); ++i) w.push_back(d.cells[i]);
            }
        }
    }

    auto check_steps = [&](const std::vector<Vertex>& p, const std::string& who) {
        for (size_t i = 0; i < p.size(); ++i) {
            if (p[i] < 0 || p[i] >= map.size() || map.blocked(p[i])) {
                flag(who + ": leaves free space at t=" + std::to_string(i));
                return;
            }
            if (i > 0 && p[i] != p[i - 1] && !map.adjacent(p[i - 1], p[i])) {
                flag(who + ": non-adjacent step at t=" + std::to_string(i));
                return;
            }
        }
    };
    for (int a = 0; a < N; ++a) {
        const auto& p = result.agent_paths[static_cast<size_t>(a)];
        if (p.empty() || p.front() != inst.agent_starts[static_cast<size_t>(a)])
            flag("agent " + std::to_string(a) + ": does not start at its initial cell");
        check_steps(walked[static_cast<size_t>(a)], "agent " + std::to_string(a));
    }
    for (int s = 0; s < M; ++s) {
        const auto& p = result.shelf_paths[static_cast<size_t>(s)];
        if (p.empty() || p.front() != inst.shelves[static_cast<size_t>(s)].pickup)
            flag("shelf " + std::to_string(s) + ": does not start at its pickup");
        else if (p.back() != inst.shelves[static_cast<size_t>(s)].delivery)
            flag("shelf " + std::to_string(s) + ": does not end at its delivery");
        check_steps(p, "shelf " + std::to_string(s));
    }

    // Pairwise collisions with end-time padding.
    auto pairwise = [&](const std::vector<std::vector<Vertex>>& paths, const std::string& kind) {
        const int n = static_cast<int>(paths.size());
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const auto& pi = paths[static_cast<size_t>(i)];
                const auto& pj = paths[static_cast<size_t>(j)];
                if (pi.empty() || pj.empty()) continue;
                const int horizon = static_cast<int>(std::max(pi.size(), pj.size()));
                for (int t = 0; t < horizon; ++t) {
                    if (padded(pi, t) == padded(pj, t)) {
                        flag(kind + " vertex collision: " + std::to_string(i) + " vs " +
                             std::to_string(j) + " at t=" + std::to_string(t));
                        break;
                    }
                    if (t + 1 < horizon && padded(pi, t) == padded(pj, t + 1) &&
                        padded(pi, t + 1) == padded(pj, t)) {
                        flag(kind + " edge collision: " + std::to_string(i) + " vs " +
                             std::to_string(j) + " at t=" + std::to_string(t));
                        break;
                    }
                }
            }
    };
    pairwise(walked, "agent");
    pairwise(result.shelf_paths, "shelf");

    // Carry windows from the event log.
    std::vector<std::vector<CarryWindow>> windows(static_cast<size_t>(M));
    {
        std::vector<LiftPlaceEvent> ev = result.events;
        std::stable_sort(ev.begin(), ev.end(),
                         [](const LiftPlaceEvent& x, const LiftPlaceEvent& y) {
                             if (x.shelf != y.shelf) return x.shelf < y.shelf;
                             return x.time < y.time;
                         });
        for (size_t i = 0; i < ev.size(); ++i) {
            if (ev[i].shelf < 0 || ev[i].shelf >= M) {
                flag("event with bad shelf id");
                continue;
            }
            if (ev[i].is_lift) {
                if (i + 1 >= ev.size() || ev[i + 1].is_lift || ev[i + 1].shelf != ev[i].shelf ||
                    ev[i + 1].agent != ev[i].agent) {
                    flag("lift without matching place for shelf " + std::to_string(ev[i].shelf));
                    continue;
                }
                windows[static_cast<size_t>(ev[i].shelf)].push_back(
                    CarryWindow{ev[i].agent, ev[i].time, ev[i + 1].time});
                ++i;
            } else {
                flag("place without matching lift for shelf " + std::to_string(ev[i].shelf));
            }
        }
    }

    for (int s = 0; s < M; ++s) {
        const auto& sp = result.shelf_paths[static_cast<size_t>(s)];
        const auto& ws = windows[static_cast<size_t>(s)];
        auto carried_move_ok = [&](int t) {
            for (const CarryWindow& w : ws)
                if (t >= w.lift_time + delta && t + 1 <= w.place_time) return true;
            return false;
        };
        for (int t = 0; t + 1 < static_cast<int>(sp.size()); ++t)
            if (sp[static_cast<size_t>(t)] != sp[static_cast<size_t>(t + 1)] &&
                !carried_move_ok(t)) {
                flag("shelf " + std::to_string(s) + ": moves without a carrying window at t=" +
                     std::to_string(t));
                break;
            }
        for (const CarryWindow& w : ws) {
            if (w.agent < 0 || w.agent >= N) {
                flag("carry window with bad agent");
                continue;
            }
            const auto& apath = walked[static_cast<size_t>(w.agent)];
            for (int t = w.lift_time; t <= w.place_time + delta; ++t)
                if (padded(apath, t) != padded(sp, t)) {
                    flag("shelf " + std::to_string(s) + ": not co-located with agent " +
                         std::to_string(w.agent) + " at t=" + std::to_string(t));
                    break;
                }
            for (int t = w.lift_time; t < w.lift_time + delta; ++t)
                if (padded(sp, t) != padded(sp, t + 1)) {
                    flag("shelf " + std::to_string(s) + ": moves during its lift window");
                    break;
                }
            for (int t = w.place_time; t < w.place_time + delta; ++t)
                if (padded(apath, t) != padded(apath, t + 1)) {
                    flag("agent " + std::to_string(w.agent) + ": moves during a place window");
                    break;
                }
        }
    }

    // Waypoint traversal order must respect the result's dependency arcs.
    const DependencyGraph& dep = result.final_dep;
    if (dep.num_shelves() == M) {
        std::vector<std::vector<int>> times(static_cast<size_t>(M));
        for (int s = 0; s < M; ++s) {
            const auto& wp = dep.waypoints(s);
            const auto& sp = result.shelf_paths[static_cast<size_t>(s)];
            auto& ts = times[static_cast<size_t>(s)];
            ts.assign(wp.size(), -1);
            if (wp.empty() || sp.empty() || wp.front() != sp.front()) {
                flag("shelf " + std::to_string(s) + ": trajectory does not match its path");
                continue;
            }
            size_t k = 0;
            ts[0] = 0;
            for (int t = 1; t < static_cast<int>(sp.size()); ++t)
                if (k + 1 < wp.size() && sp[static_cast<size_t>(t)] == wp[k + 1]) {
                    ++k;
                    ts[k] = t;
                }
            if (k + 1 != wp.size())
                flag("shelf " + std::to_string(s) + ": does not traverse all waypoints in order");
        }
        for (const DepArc& a : dep.arcs()) {
            if (!a.validation) continue;
            const int ts = times[static_cast<size_t>(a.src.shelf)][static_cast<size_t>(a.src.index)];
            const int td = times[static_cast<size_t>(a.dst.shelf)][static_cast<size_t>(a.dst.index)];
            if (ts < 0 || td < 0) continue;  // already flagged above
            if (ts > td)
                flag("precedence violation: shelf " + std::to_string(a.src.shelf) + " waypoint " +
                     std::to_string(a.src.index) + " after shelf " + std::to_string(a.dst.shelf) +
                     " waypoint " + std::to_string(a.dst.index));
        }
    } else {
        flag("result dependency graph does not cover all shelves");
    }

    return out;
}

}  // namespace ddmapd
