#include "ddmapd/executor.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include "ddmapd/hungarian.hpp"
#include "ddmapd/strategies.hpp"

namespace ddmapd {

int ExecutionState::t_avail_min() const {
    int m = kInfTime;
    for (int a = 0; a < num_agents(); ++a) m = std::min(m, t_avail(a));
    return m;
}

std::vector<int> ExecutionState::shelf_end_times() const {
    std::vector<int> out(static_cast<size_t>(num_shelves()));
    for (int s = 0; s < num_shelves(); ++s) out[static_cast<size_t>(s)] = shelf_end(s);
    return out;
}

std::vector<char> ExecutionState::shelf_assigned_flags() const {
    std::vector<char> out(static_cast<size_t>(num_shelves()), 0);
    for (int s = 0; s < num_shelves(); ++s)
        out[static_cast<size_t>(s)] = shelf_assigned_to[static_cast<size_t>(s)] >= 0;
    return out;
}

int t_hat_start(int agent, int shelf, const ExecutionState& st) {
    const int rel = st.release_time(shelf);
    if (rel >= kInfTime) throw InvariantError("t_hat_start on a shelf with infinite release");
    const int d = st.oracle->dist(st.agent_cell(agent), st.dep.current_cell(shelf));
    return std::max(st.t_avail(agent) + d, rel);
}

std::optional<RoundRecord> shelf_assignment(const ExecutionState& st) {
    std::vector<int> agents;
    for (int a = 0; a < st.num_agents(); ++a)
        if (st.agent_assignment[static_cast<size_t>(a)] < 0 || st.cfg.rematch_assigned)
            agents.push_back(a);
    std::vector<int> cands;
    std::vector<int> rels;
    for (int s = 0; s < st.num_shelves(); ++s) {
        if (st.dep.completed(s)) continue;
        if (st.shelf_assigned_to[static_cast<size_t>(s)] >= 0) continue;
        const int rel = st.release_time(s);
        if (rel >= kInfTime) continue;
        cands.push_back(s);
        rels.push_back(rel);
    }
    if (agents.empty() || cands.empty()) return std::nullopt;

    // The waiting-delay entries clamp at zero, which ties every agent that
    // can reach a not-yet-released shelf in time; resolve those ties inside
    // the matching toward shorter travel by scaling the primary cost.
    constexpr long long kTieScale = 1 << 13;
    const long long penalty = st.inst->penalty() * kTieScale;
    const int n = std::max(agents.size(), cands.size());
    std::vector<std::vector<long long>> cost(static_cast<size_t>(n),
                                             std::vector<long long>(static_cast<size_t>(n), penalty));
    for (size_t i = 0; i < agents.size(); ++i)
        for (size_t j = 0; j < cands.size(); ++j) {
            const int d = st.oracle->dist(st.agent_cell(agents[i]), st.dep.current_cell(cands[j]));
            if (d >= kInfTime) continue;  // unreachable pair keeps the penalty
            const long long delay = std::max<long long>(
                static_cast<long long>(st.t_avail(agents[i])) + d - rels[j], 0);
            cost[i][j] = delay * kTieScale + d;
        }
    const std::vector<int> rowsol = hungarian(cost);

    std::optional<RoundRecord> best;
    int best_start = kInfTime;
    for (size_t i = 0; i < agents.size(); ++i) {
        const int j = rowsol[i];
        if (j < 0 || j >= static_cast<int>(cands.size())) continue;
        const int a = agents[i];
        const int s = cands[static_cast<size_t>(j)];
        const int start = t_hat_start(a, s, st);
        const bool better =
            !best || start < best_start ||
            (start == best_start && (s < best->shelf || (s == best->shelf && a < best->agent)));
        if (better) {
            best = RoundRecord{a, s};
            best_start = start;
        }
    }
    return best;
}

ReservationTable build_reservations(const ExecutionState& st) {
    ReservationTable res;
    for (int a = 0; a < st.num_agents(); ++a) {
        const auto& dummy = st.dummies[static_cast<size_t>(a)];
        res.add_path(ReservationTable::kAgentLayer, TimedPath{0, st.agent_paths[static_cast<size_t>(a)]},
                     !dummy.has_value(), Owner{OwnerKind::Agent, a});
        if (dummy)
            res.add_path(ReservationTable::kAgentLayer, *dummy, true, Owner{OwnerKind::Dummy, a});
    }
    for (int s = 0; s < st.num_shelves(); ++s)
        res.add_path(ReservationTable::kShelfLayer, TimedPath{0, st.shelf_paths[static_cast<size_t>(s)]},
                     true, Owner{OwnerKind::Shelf, s});
    return res;
}

namespace {

std::string state_snapshot(const ExecutionState& st) {
    std::ostringstream os;
    os << "agents:";
    for (int a = 0; a < st.num_agents(); ++a)
        os << " a" << a << "@" << st.agent_cell(a) << "/t" << st.t_avail(a)
           << (st.agent_assignment[static_cast<size_t>(a)] >= 0 ? "*" : "");
    os << " shelves:";
    for (int s = 0; s < st.num_shelves(); ++s)
        os << " s" << s << (st.dep.completed(s) ? "!" : "") << "@" << st.dep.current_cell(s);
    return os.str();
}

}  // namespace

void plan_and_commit(ExecutionState& st, int agent, int shelf, bool forward_only) {
    DependencyGraph& dep = st.dep;
    const int cur = dep.current_index(shelf);
    // The baseline executes static tasks; CREST carries the whole currently
    // unconstrained span.
    const int target = forward_only ? dep.task_end_index(shelf) : dep.new_waypoint_index(shelf);
    if (target <= cur)
        throw InvariantError("plan_and_commit: empty unconstrained segment (" +
                             state_snapshot(st) + ")");
    const bool carrying = st.agent_carrying[static_cast<size_t>(agent)] == shelf;

    // The previous dummy is superseded by this plan.
    st.dummies[static_cast<size_t>(agent)].reset();

    CarryQuery q;
    q.agent = agent;
    q.agent_cell = st.agent_cell(agent);
    q.t_avail = st.t_avail(agent);
    q.shelf = shelf;
    const auto& wp = dep.waypoints(shelf);
    q.segment.assign(wp.begin() + cur, wp.begin() + target + 1);
    q.agent_home = st.inst->agent_starts[static_cast<size_t>(agent)];
    q.overhead_delta = st.cfg.overhead_delta;
    q.segment_floors.assign(q.segment.size(), 0);
    for (int j = 1; j < static_cast<int>(q.segment.size()); ++j)
        q.segment_floors[static_cast<size_t>(j)] = dep.arrival_floor(shelf, cur + j);
    q.start_carrying = carrying;
    q.allow_carry_wait = !forward_only;
    q.allow_carry_backward = !forward_only;

    const ReservationTable res = build_reservations(st);
    const auto planned = plan_carry(st.inst->map, q, res);
    if (!planned)
        throw InvariantError("MLSIPP failed for agent " + std::to_string(agent) + ", shelf " +
                             std::to_string(shelf) + " (" + state_snapshot(st) + ")");

    // Keep holding the shelf at s.new when the agent can park there for good
    // (its stay is only bounded by this round's continue/switch decision, so
    // an open-ended hold must be conflict-free); place immediately otherwise.
    bool pause = !forward_only && target + 1 < dep.length(shelf);
    if (pause)
        for (const auto& [lo, hi] : res.blocked_intervals(
                 ReservationTable::kAgentLayer, q.segment.back(), agent, shelf))
            if (hi >= planned->arrival) pause = false;

    auto& ap = st.agent_paths[static_cast<size_t>(agent)];
    const size_t keep =
        pause ? static_cast<size_t>(planned->arrival - planned->agent_path.t0)
              : planned->agent_path.cells.size() - 1;
    for (size_t i = 1; i <= keep; ++i) ap.push_back(planned->agent_path.cells[i]);

    auto& sp = st.shelf_paths[static_cast<size_t>(shelf)];
    const Vertex shelf_cell = q.segment.front();
    while (static_cast<int>(sp.size()) <= planned->lift_end) sp.push_back(shelf_cell);
    for (size_t i = 1; i < planned->carried.cells.size(); ++i)
        sp.push_back(planned->carried.cells[i]);

    if (!carrying) st.events.push_back(LiftPlaceEvent{true, agent, shelf, planned->lift_start});
    if (pause) {
        st.agent_carrying[static_cast<size_t>(agent)] = shelf;
    } else {
        st.events.push_back(LiftPlaceEvent{false, agent, shelf, planned->arrival});
        st.dummies[static_cast<size_t>(agent)] = planned->dummy;
        st.agent_carrying[static_cast<size_t>(agent)] = -1;
    }
    for (int j = 1; j < static_cast<int>(q.segment.size()); ++j)
        dep.mark_traversed(shelf, cur + j, planned->segment_first_time[static_cast<size_t>(j)]);
}

// Place the held shelf where the agent stands and plan the return segment.
void finish_carry(ExecutionState& st, int agent) {
    const int shelf = st.agent_carrying[static_cast<size_t>(agent)];
    if (shelf < 0) return;
    const int place_start = st.t_avail(agent);
    const Vertex cell = st.agent_cell(agent);
    auto& ap = st.agent_paths[static_cast<size_t>(agent)];
    for (int t = 0; t < st.cfg.overhead_delta; ++t) ap.push_back(cell);
    st.events.push_back(LiftPlaceEvent{false, agent, shelf, place_start});
    st.agent_carrying[static_cast<size_t>(agent)] = -1;

    CarryQuery q;
    q.agent = agent;
    q.shelf = shelf;
    q.agent_home = st.inst->agent_starts[static_cast<size_t>(agent)];
    const ReservationTable res = build_reservations(st);
    const auto dummy = plan_return(st.inst->map, q, cell, st.t_avail(agent), res);
    if (!dummy)
        throw InvariantError("return segment planning failed for agent " + std::to_string(agent) +
                             " (" + state_snapshot(st) + ")");
    st.dummies[static_cast<size_t>(agent)] = *dummy;
}

namespace {

void release_assignment(ExecutionState& st, int agent) {
    const int s = st.agent_assignment[static_cast<size_t>(agent)];
    if (s >= 0) st.shelf_assigned_to[static_cast<size_t>(s)] = -1;
    st.agent_assignment[static_cast<size_t>(agent)] = -1;
    st.agent_active[static_cast<size_t>(agent)] = 0;
    st.agent_newly_assigned[static_cast<size_t>(agent)] = 0;
}

}  // namespace

void init_execution_state(ExecutionState& st, const Instance& inst, const ShelfPlan& plan,
                          const ExecutionConfig& cfg, const DistanceOracle& oracle) {
    const PlanValidity pv = validate_shelf_plan(plan, inst);
    if (!pv.ok()) throw InvariantError("executor requires a valid safe 1-robust plan:\n" + pv.describe());
    st.inst = &inst;
    st.oracle = &oracle;
    st.cfg = cfg;
    st.dep = DependencyGraph::build(plan);
    st.agent_paths.assign(static_cast<size_t>(inst.num_agents()), {});
    for (int a = 0; a < inst.num_agents(); ++a)
        st.agent_paths[static_cast<size_t>(a)].push_back(inst.agent_starts[static_cast<size_t>(a)]);
    st.shelf_paths.assign(static_cast<size_t>(inst.num_shelves()), {});
    for (int s = 0; s < inst.num_shelves(); ++s)
        st.shelf_paths[static_cast<size_t>(s)].push_back(inst.shelves[static_cast<size_t>(s)].pickup);
    st.dummies.assign(static_cast<size_t>(inst.num_agents()), std::nullopt);
    st.agent_assignment.assign(static_cast<size_t>(inst.num_agents()), -1);
    st.agent_carrying.assign(static_cast<size_t>(inst.num_agents()), -1);
    st.agent_active.assign(static_cast<size_t>(inst.num_agents()), 0);
    st.agent_newly_assigned.assign(static_cast<size_t>(inst.num_agents()), 0);
    st.shelf_assigned_to.assign(static_cast<size_t>(inst.num_shelves()), -1);
}

ExecutionResult finalize_result(ExecutionState& st, const std::string& method) {
    ExecutionResult out;
    out.method = method;
    out.overhead_delta = st.cfg.overhead_delta;
    out.agent_paths = std::move(st.agent_paths);
    out.shelf_paths = std::move(st.shelf_paths);
    out.leftover_dummies.resize(static_cast<size_t>(st.inst->num_agents()));
    for (int a = 0; a < st.inst->num_agents(); ++a)
        if (st.dummies[static_cast<size_t>(a)])
            out.leftover_dummies[static_cast<size_t>(a)] = *st.dummies[static_cast<size_t>(a)];
    out.events = std::move(st.events);
    out.rounds = std::move(st.rounds);
    out.final_dep = std::move(st.dep);
    out.audit = st.audit;
    return out;
}

ExecutionResult run_crest(const Instance& inst, const ShelfPlan& plan,
                          const ExecutionConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    DistanceOracle oracle(inst.map);
    ExecutionState st;
    init_execution_state(st, inst, plan, cfg, oracle);

    auto uncompleted_exists = [&st]() {
        for (int s = 0; s < st.num_shelves(); ++s)
            if (!st.dep.completed(s)) return true;
        return false;
    };
    auto check_budget = [&]() {
        if (cfg.time_budget_s <= 0) return;
        const double sec =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        if (sec > cfg.time_budget_s) throw TimeoutError("execution budget exceeded");
    };
    auto audit_acyclicity = [&st]() {
        if (!st.dep.is_acyclic()) ++st.audit.acyclicity_failures;
    };

    while (uncompleted_exists()) {
        check_budget();
        const auto pick = shelf_assignment(st);
        if (!pick)
            throw InvariantError("ShelfAssignment found no candidate pair (" + state_snapshot(st) +
                                 ")");
        st.rounds.push_back(*pick);
        st.agent_assignment[static_cast<size_t>(pick->agent)] = pick->shelf;
        st.shelf_assigned_to[static_cast<size_t>(pick->shelf)] = pick->agent;
        st.agent_active[static_cast<size_t>(pick->agent)] = 1;
        st.agent_newly_assigned[static_cast<size_t>(pick->agent)] = 1;

        while (true) {
            int a = -1;
            for (int i = 0; i < st.num_agents(); ++i) {
                if (!st.agent_active[static_cast<size_t>(i)]) continue;
                const int s = st.agent_assignment[static_cast<size_t>(i)];
                if (s < 0 || st.dep.completed(s)) continue;
                if (a < 0 || st.t_avail(i) < st.t_avail(a)) a = i;
            }
            if (a < 0) break;
            const int s = st.agent_assignment[static_cast<size_t>(a)];

            bool go = false;
            if (st.agent_newly_assigned[static_cast<size_t>(a)]) {
                st.agent_newly_assigned[static_cast<size_t>(a)] = 0;
                go = true;
            } else {
                const int rel = st.release_time(s);
                if (rel <= st.t_avail(a) + 2 * cfg.overhead_delta)
                    go = true;
                else if (rel >= kInfTime && (cfg.use_ds || cfg.use_gtr))
                    go = (cfg.use_ds && dep_switch(s, st)) || (cfg.use_gtr && group_replan(s, st));
            }

            if (go) {
                if (cfg.use_str) {
                    single_replan(s, st);
                    audit_acyclicity();
                }
                plan_and_commit(st, a, s, /*forward_only=*/false);
                if (st.dep.completed(s)) {
                    finish_carry(st, a);
                    release_assignment(st, a);
                }
                for (int i = 0; i < st.num_agents(); ++i)
                    if (st.agent_assignment[static_cast<size_t>(i)] >= 0)
                        st.agent_active[static_cast<size_t>(i)] = 1;
            } else {
                finish_carry(st, a);
                release_assignment(st, a);
            }
            st.dep.prune_traversed_arcs(st.shelf_end_times());
            audit_acyclicity();
        }
    }

    ExecutionResult out = finalize_result(st, crest_method_name(cfg));
    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return out;
}

}  // namespace ddmapd
