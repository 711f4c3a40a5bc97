#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "ddmapd/core.hpp"

namespace ddmapd {

enum class OwnerKind : uint8_t { Agent, Dummy, Shelf };

struct Owner {
    OwnerKind kind = OwnerKind::Agent;
    int id = -1;
    bool operator==(const Owner&) const = default;
};

struct BlockInterval {
    int lo = 0;
    int hi = 0;  // inclusive; kInfTime for held-forever
    Owner owner;
};

// Two-layer time reservation table. The agent layer carries committed agent
// paths, live dummy segments, and the terminal hold at the end of each
// agent's chain; the shelf layer carries committed shelf paths with each
// shelf holding its current cell until next carried. Planners exclude their
// own agent (its real path and dummy) and their own shelf by id.
class ReservationTable {
  public:
    enum Layer { kAgentLayer = 0, kShelfLayer = 1 };

    // Occupies cells[i] at time t0+i; when hold_final, the last cell stays
    // occupied on [t_end, inf).
    void add_path(Layer layer, const TimedPath& path, bool hold_final, Owner owner);

    bool vertex_blocked(Layer layer, Vertex v, int t, int skip_agent, int skip_shelf) const;
    // True when some non-excluded reservation traverses v->u over [t, t+1]
    // (i.e. a move u->v at that step would swap with it).
    bool edge_blocked(Layer layer, Vertex u, Vertex v, int t, int skip_agent,
                      int skip_shelf) const;

    // Sorted, merged blocked intervals at a cell, with exclusions applied.
    std::vector<std::pair<int, int>> blocked_intervals(Layer layer, Vertex v, int skip_agent,
                                                       int skip_shelf) const;
    // Complement of blocked_intervals: maximal safe intervals covering [0, inf).
    std::vector<std::pair<int, int>> safe_intervals(Layer layer, Vertex v, int skip_agent,
                                                    int skip_shelf) const;
    // Safe intervals of the union of both layers (used while carrying).
    std::vector<std::pair<int, int>> safe_intervals_merged(Vertex v, int skip_agent,
                                                           int skip_shelf) const;

    static bool excluded(const Owner& o, int skip_agent, int skip_shelf) {
        if (o.kind == OwnerKind::Shelf) return o.id == skip_shelf;
        return o.id == skip_agent;  // Agent and Dummy reservations of the planning agent
    }

  private:
    static uint64_t edge_key(Vertex u, Vertex v, int t) {
        return (static_cast<uint64_t>(static_cast<uint32_t>(u)) << 42) ^
               (static_cast<uint64_t>(static_cast<uint32_t>(v)) << 21) ^
               static_cast<uint64_t>(static_cast<uint32_t>(t));
    }

    std::unordered_map<Vertex, std::vector<BlockInterval>> cells_[2];
    std::unordered_map<uint64_t, std::vector<Owner>> edges_[2];

    void collect(Layer layer, Vertex v, int skip_agent, int skip_shelf,
                 std::vector<std::pair<int, int>>& out) const;
};

}  // namespace ddmapd
