#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ddmapd/core.hpp"
#include "ddmapd/grid.hpp"

namespace ddmapd {

struct ExecutionConfig {
    int overhead_delta = 0;      // timesteps per lift or place
    int ds_depth_limit = 5;      // dependency-switch recursion limit
    bool use_str = false;
    bool use_ds = false;
    bool use_gtr = false;
    // 0 means "derive as width*height*(M+N)", which strictly dominates any
    // feasible waiting delay so the matching never prefers unmatched pairs.
    long long unmatched_penalty = 0;
    // Allow agents that already hold an assignment to enter the matching.
    bool rematch_assigned = false;
    double time_budget_s = 0.0;  // 0 = unlimited
};

struct Shelf {
    Vertex pickup = 0;
    Vertex delivery = 0;
};

struct Instance {
    GridMap map;
    std::vector<Vertex> agent_starts;
    std::vector<Shelf> shelves;
    ExecutionConfig config;

    int num_agents() const { return static_cast<int>(agent_starts.size()); }
    int num_shelves() const { return static_cast<int>(shelves.size()); }
    long long penalty() const {
        if (config.unmatched_penalty > 0) return config.unmatched_penalty;
        return static_cast<long long>(map.width()) * map.height() *
               (num_shelves() + num_agents());
    }

    // Throws InvariantError when the basic structural invariants are broken
    // (duplicate starts/pickups/deliveries, N > M, pickup on an agent start,
    // out-of-bounds or blocked coordinates).
    void check_valid() const;
};

struct WellFormedReport {
    bool connectivity_ok = false;   // G stays connected after removing any N-1 starts
    bool two_empty_cells = false;   // >= 2 cells free of agent starts and shelf pickups
    std::optional<int> disconnecting_agent;  // kept agent whose removal set disconnects G
    int empty_cell_count = 0;
    bool well_formed() const { return connectivity_ok && two_empty_cells; }
};

WellFormedReport check_well_formed(const Instance& inst);

// Scenario format: header "ddmapd 1", then "agent <row> <col>" and
// "shelf <p_row> <p_col> <d_row> <d_col>" lines in any order.
Instance load_instance(const std::string& map_path, const std::string& scen_path);
void parse_scenario(const std::string& text, Instance& inst);
void save_scenario(const Instance& inst, const std::string& path);

}  // namespace ddmapd
