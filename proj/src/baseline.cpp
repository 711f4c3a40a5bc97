#include "ddmapd/baseline.hpp"

#include <algorithm>
#include <chrono>

namespace ddmapd {

ExecutionResult run_decomp_pp(const Instance& inst, const ShelfPlan& plan,
                              const ExecutionConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    DistanceOracle oracle(inst.map);
    ExecutionState st;
    ExecutionConfig base_cfg = cfg;
    base_cfg.use_str = base_cfg.use_ds = base_cfg.use_gtr = false;
    init_execution_state(st, inst, plan, base_cfg, oracle);

    auto check_budget = [&]() {
        if (cfg.time_budget_s <= 0) return;
        const double sec =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        if (sec > cfg.time_budget_s) throw TimeoutError("execution budget exceeded");
    };

    auto all_completed = [&st]() {
        for (int s = 0; s < st.num_shelves(); ++s)
            if (!st.dep.completed(s)) return false;
        return true;
    };

    // Shelf s is released at clock time t when its next waypoint has no
    // pending predecessor and the passing times have already elapsed.
    auto released_at = [&st](int s, int t) {
        const int rel = st.release_time(s);
        return rel < kInfTime && rel <= t;
    };

    int clock = 0;
    while (!all_completed()) {
        check_budget();
        bool progressed = true;
        while (progressed) {
            progressed = false;
            int best_a = -1, best_s = -1, best_d = kInfTime;
            for (int s = 0; s < st.num_shelves(); ++s) {
                if (st.dep.completed(s)) continue;
                if (st.shelf_assigned_to[static_cast<size_t>(s)] >= 0) continue;
                if (!released_at(s, clock)) continue;
                for (int a = 0; a < st.num_agents(); ++a) {
                    if (st.agent_assignment[static_cast<size_t>(a)] >= 0) continue;
                    if (st.t_avail(a) > clock) continue;
                    const int d = st.oracle->dist(st.agent_cell(a), st.dep.current_cell(s));
                    if (d < best_d) {
                        best_d = d;
                        best_a = a;
                        best_s = s;
                    }
                }
            }
            if (best_a < 0) break;
            st.rounds.push_back(RoundRecord{best_a, best_s});
            st.agent_assignment[static_cast<size_t>(best_a)] = best_s;
            st.shelf_assigned_to[static_cast<size_t>(best_s)] = best_a;
            plan_and_commit(st, best_a, best_s, /*forward_only=*/true);
            // Online-MAPD style: the agent is busy until its path ends, then
            // both sides return to the pool.
            st.agent_assignment[static_cast<size_t>(best_a)] = -1;
            st.shelf_assigned_to[static_cast<size_t>(best_s)] = -1;
            st.dep.prune_traversed_arcs(st.shelf_end_times());
            if (!st.dep.is_acyclic()) ++st.audit.acyclicity_failures;
            progressed = true;
        }
        if (all_completed()) break;

        // Advance the clock to the next event: an agent frees up or a
        // pending release time passes.
        int next_t = kInfTime;
        for (int a = 0; a < st.num_agents(); ++a)
            if (st.t_avail(a) > clock) next_t = std::min(next_t, st.t_avail(a));
        for (int s = 0; s < st.num_shelves(); ++s) {
            if (st.dep.completed(s) || st.shelf_assigned_to[static_cast<size_t>(s)] >= 0) continue;
            const int rel = st.release_time(s);
            if (rel < kInfTime && rel > clock) next_t = std::min(next_t, rel);
        }
        if (next_t >= kInfTime)
            throw InvariantError("baseline executor stalled with uncompleted shelves");
        clock = next_t;
    }

    ExecutionResult out = finalize_result(st, "baseline");
    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return out;
}

}  // namespace ddmapd
