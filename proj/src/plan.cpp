#include "ddmapd/plan.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

namespace ddmapd {

namespace {

inline Vertex at_padded(const std::vector<Vertex>& w, int k) {
    const int n = static_cast<int>(w.size());
    return w[static_cast<size_t>(k < n ? k : n - 1)];
}

}  // namespace

std::string PlanValidity::describe() const {
    std::ostringstream os;
    auto line = [&os](const char* name, bool flag, const std::optional<PlanViolation>& w) {
        os << name << ": " << (flag ? "ok" : "VIOLATION");
        if (!flag && w) {
            os << " (shelf " << w->shelf_a;
            if (w->shelf_b >= 0) os << " vs shelf " << w->shelf_b;
            os << " at step " << w->step << ", cell " << w->cell << ")";
        }
        os << '\n';
    };
    line("endpoints", endpoints_correct, endpoints_witness);
    line("steps", steps_valid, steps_witness);
    line("vertex-collision-free", collision_free, collision_witness);
    line("edge-swap-free", edge_swap_free, edge_swap_witness);
    line("safe", safe, safe_witness);
    line("1-robust", one_robust, one_robust_witness);
    return os.str();
}

PlanValidity validate_shelf_plan(const ShelfPlan& plan, const Instance& inst) {
    if (plan.num_shelves() != inst.num_shelves())
        throw InvariantError("plan has " + std::to_string(plan.num_shelves()) +
                             " trajectories for " + std::to_string(inst.num_shelves()) +
                             " shelves");
    PlanValidity v;
    const int M = plan.num_shelves();

    std::unordered_set<Vertex> starts(inst.agent_starts.begin(), inst.agent_starts.end());
    for (int s = 0; s < M; ++s) {
        const auto& w = plan.trajectories[static_cast<size_t>(s)].waypoints;
        if (w.empty() || w.front() != inst.shelves[static_cast<size_t>(s)].pickup ||
            w.back() != inst.shelves[static_cast<size_t>(s)].delivery) {
            if (v.endpoints_correct) {
                v.endpoints_correct = false;
                v.endpoints_witness = PlanViolation{s, -1, 0, w.empty() ? -1 : w.front()};
            }
        }
        for (size_t k = 0; k + 1 < w.size(); ++k) {
            if (w[k] != w[k + 1] && !inst.map.adjacent(w[k], w[k + 1])) {
                if (v.steps_valid) {
                    v.steps_valid = false;
                    v.steps_witness = PlanViolation{s, -1, static_cast<int>(k), w[k]};
                }
                break;
            }
        }
        for (size_t k = 0; k < w.size(); ++k) {
            if (starts.count(w[k])) {
                if (v.safe) {
                    v.safe = false;
                    v.safe_witness = PlanViolation{s, -1, static_cast<int>(k), w[k]};
                }
                break;
            }
        }
    }

    for (int a = 0; a < M; ++a) {
        for (int b = a + 1; b < M; ++b) {
            const auto& wa = plan.trajectories[static_cast<size_t>(a)].waypoints;
            const auto& wb = plan.trajectories[static_cast<size_t>(b)].waypoints;
            if (wa.empty() || wb.empty()) continue;
            const int horizon = static_cast<int>(std::max(wa.size(), wb.size()));
            for (int k = 0; k < horizon; ++k) {
                const Vertex pa = at_padded(wa, k);
                const Vertex pb = at_padded(wb, k);
                if (v.collision_free && pa == pb) {
                    v.collision_free = false;
                    v.collision_witness = PlanViolation{a, b, k, pa};
                }
                if (k + 1 < horizon) {
                    const Vertex na = at_padded(wa, k + 1);
                    const Vertex nb = at_padded(wb, k + 1);
                    if (v.edge_swap_free && pa == nb && na == pb && pa != na) {
                        v.edge_swap_free = false;
                        v.edge_swap_witness = PlanViolation{a, b, k, pa};
                    }
                    if (v.one_robust && (na == pb || nb == pa)) {
                        v.one_robust = false;
                        v.one_robust_witness = PlanViolation{a, b, k, na == pb ? pb : pa};
                    }
                }
                if (!v.collision_free && !v.edge_swap_free && !v.one_robust) break;
            }
        }
    }
    return v;
}

ShelfPlan simplify_plan(const ShelfPlan& plan) {
    ShelfPlan out;
    out.simplified = true;
    out.trajectories.reserve(plan.trajectories.size());
    for (const auto& t : plan.trajectories) {
        ShelfTrajectory st;
        st.shelf = t.shelf;
        for (Vertex w : t.waypoints)
            if (st.waypoints.empty() || st.waypoints.back() != w) st.waypoints.push_back(w);
        out.trajectories.push_back(std::move(st));
    }
    return out;
}

ShelfPlan parse_plan(const std::string& text, const GridMap& map) {
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& what) {
        throw ParseError("plan line " + std::to_string(lineno) + ": " + what);
    };

    ShelfPlan plan;
    int expected = -1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (expected < 0) {
            int version = 0;
            if (key != "ddmapd-plan" || !(ls >> version >> expected) || version != 1 || expected < 0)
                fail("expected 'ddmapd-plan 1 <M>'");
            continue;
        }
        if (key != "traj") fail("unexpected token '" + key + "'");
        ShelfTrajectory t;
        int len = 0;
        if (!(ls >> t.shelf >> len) || len < 1) fail("bad traj header");
        if (t.shelf != static_cast<int>(plan.trajectories.size())) fail("traj ids must be 0..M-1 in order");
        for (int i = 0; i < len; ++i) {
            Cell c;
            if (!(ls >> c.row >> c.col)) fail("short waypoint list");
            if (!map.in_bounds(c)) fail("waypoint out of bounds");
            t.waypoints.push_back(map.to_vertex(c));
        }
        plan.trajectories.push_back(std::move(t));
    }
    if (expected < 0) throw ParseError("plan: missing header");
    if (static_cast<int>(plan.trajectories.size()) != expected)
        throw ParseError("plan: expected " + std::to_string(expected) + " trajectories, got " +
                         std::to_string(plan.trajectories.size()));
    return plan;
}

ShelfPlan load_plan(const std::string& path, const GridMap& map) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open plan file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_plan(ss.str(), map);
}

void save_plan(const ShelfPlan& plan, const GridMap& map, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ParseError("cannot write plan file: " + path);
    f << "ddmapd-plan 1 " << plan.num_shelves() << '\n';
    for (const auto& t : plan.trajectories) {
        f << "traj " << t.shelf << ' ' << t.waypoints.size();
        for (Vertex w : t.waypoints) {
            const Cell c = map.to_cell(w);
            f << ' ' << c.row << ' ' << c.col;
        }
        f << '\n';
    }
}

}  // namespace ddmapd
