#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ddmapd/core.hpp"
#include "ddmapd/instance.hpp"

namespace ddmapd {

// Waypoint sequence for one shelf. In an unsimplified plan the index is the
// timestep; after simplification the index only orders distinct locations.
struct ShelfTrajectory {
    int shelf = 0;
    std::vector<Vertex> waypoints;

    bool operator==(const ShelfTrajectory&) const = default;

    // End-time convention: the step of the first arrival at the final
    // location (trailing waits do not count).
    int end_time() const {
        int last = static_cast<int>(waypoints.size()) - 1;
        while (last > 0 && waypoints[static_cast<size_t>(last - 1)] ==
                               waypoints[static_cast<size_t>(last)])
            --last;
        return last;
    }
};

struct ShelfPlan {
    std::vector<ShelfTrajectory> trajectories;
    bool simplified = false;

    bool operator==(const ShelfPlan&) const = default;
    int num_shelves() const { return static_cast<int>(trajectories.size()); }
    long long total_length() const {
        long long sum = 0;
        for (const auto& t : trajectories) sum += t.end_time();
        return sum;
    }
};

struct PlanViolation {
    int shelf_a = -1;
    int shelf_b = -1;  // -1 when the check involves a single shelf
    int step = -1;
    Vertex cell = -1;
};

struct PlanValidity {
    bool endpoints_correct = true;
    bool steps_valid = true;      // consecutive waypoints equal or adjacent
    bool collision_free = true;   // no same-step vertex sharing
    bool edge_swap_free = true;
    bool safe = true;             // never touches an agent start
    bool one_robust = true;       // tau_s(k+1) != tau_{s'}(k)
    std::optional<PlanViolation> endpoints_witness;
    std::optional<PlanViolation> steps_witness;
    std::optional<PlanViolation> collision_witness;
    std::optional<PlanViolation> edge_swap_witness;
    std::optional<PlanViolation> safe_witness;
    std::optional<PlanViolation> one_robust_witness;

    bool ok() const {
        return endpoints_correct && steps_valid && collision_free && edge_swap_free && safe &&
               one_robust;
    }
    std::string describe() const;
};

// Pairwise checks pad the shorter trajectory with waits at its final
// waypoint (the shelf holds its last location forever).
PlanValidity validate_shelf_plan(const ShelfPlan& plan, const Instance& inst);

// Collapses runs of repeated locations. The result is no longer a
// synchronized MAPF plan; consume it only through the dependency graph.
ShelfPlan simplify_plan(const ShelfPlan& plan);

// Plan file: header "ddmapd-plan 1 <M>", then per shelf
// "traj <id> <len> <r0> <c0> <r1> <c1> ...". Stores unsimplified plans.
ShelfPlan parse_plan(const std::string& text, const GridMap& map);
ShelfPlan load_plan(const std::string& path, const GridMap& map);
void save_plan(const ShelfPlan& plan, const GridMap& map, const std::string& path);

}  // namespace ddmapd
