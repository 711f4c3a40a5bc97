#include "ddmapd/metrics.hpp"

namespace ddmapd {

MetricsReport compute_metrics(const ExecutionResult& result, const ShelfPlan& original_plan,
                              int num_agents) {
    if (original_plan.num_shelves() != static_cast<int>(result.shelf_paths.size()))
        throw InvariantError("compute_metrics: plan/result shelf count mismatch");
    MetricsReport m;
    for (const auto& p : result.agent_paths) {
        const int end = static_cast<int>(p.size()) - 1;
        m.cost += end;
        m.makespan = std::max(m.makespan, end);
    }
    const long long plan_len = original_plan.total_length();
    m.norm_cost = m.cost - plan_len;
    m.norm_makespan = m.makespan - static_cast<double>(plan_len) / num_agents;

    int places = 0;
    for (const auto& e : result.events)
        if (!e.is_lift) ++places;
    int rearranged = 0;
    for (const auto& t : original_plan.trajectories)
        if (!t.waypoints.empty() && t.waypoints.front() != t.waypoints.back()) ++rearranged;
    m.switch_per_shelf = rearranged > 0 ? static_cast<double>(places) / rearranged : 0.0;
    m.runtime_s = result.wall_seconds;
    return m;
}

}  // namespace ddmapd
