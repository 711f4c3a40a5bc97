#pragma once

#include <optional>
#include <vector>

#include "ddmapd/core.hpp"
#include "ddmapd/grid.hpp"
#include "ddmapd/reservation.hpp"

namespace ddmapd {

// One carry request: bring agent `agent` from its current cell to the
// shelf's current cell, lift, carry along the unconstrained segment to its
// last cell, place, and return to the agent's initial cell on a dummy
// segment. segment[0] is the shelf's current cell.
struct CarryQuery {
    int agent = -1;
    Vertex agent_cell = -1;
    int t_avail = 0;
    int shelf = -1;
    std::vector<Vertex> segment;
    Vertex agent_home = -1;
    int overhead_delta = 0;
    // Earliest step each segment waypoint may be entered (empty means no
    // bounds). Derived from satisfied precedence arcs so that traversal
    // order stays consistent with every predecessor's passing time.
    std::vector<int> segment_floors;
    // Agent already holds the shelf at segment[0]: skip approach and lift.
    bool start_carrying = false;
    bool allow_carry_wait = true;      // cleared in baseline (forward-only) mode
    bool allow_carry_backward = true;  // cleared in baseline (forward-only) mode
};

struct PlannedCarry {
    int lift_start = 0;  // == t_avail when the query starts carrying
    int lift_end = 0;    // lift_start + delta; first carry move departs here
    int arrival = 0;     // shelf first reaches segment.back()
    int place_end = 0;   // arrival + delta
    // Agent positions from (agent_cell, t_avail) through (s.new, place_end).
    TimedPath agent_path;
    // Positions while co-located with the shelf: [lift_end .. arrival].
    TimedPath carried;
    // First time the carry reaches each segment index ([0] == lift_end).
    std::vector<int> segment_first_time;
    // Return segment from (s.new, place_end) to agent_home; time-minimal
    // given the path above. Excluded from costs, reserved for others.
    TimedPath dummy;
};

// Plans the return segment alone: used when a deferred place finally
// happens. Departs (from, t0), parks at q.agent_home forever.
std::optional<TimedPath> plan_return(const GridMap& map, const CarryQuery& q, Vertex from,
                                     int t0, const ReservationTable& res);

// Multi-label SIPP over (cell, safe interval, label). Label 0 travels on the
// agent layer only (agents pass beneath shelves), label 1 carries along the
// segment with forward/wait/backward moves checked against both layers, and
// the dummy return is planned agent-layer-only given the real path.
// Returns nullopt when no path exists within the reservation table.
std::optional<PlannedCarry> plan_carry(const GridMap& map, const CarryQuery& q,
                                       const ReservationTable& res);

}  // namespace ddmapd
