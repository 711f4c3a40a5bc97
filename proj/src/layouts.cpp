#include "ddmapd/layouts.hpp"

#include <algorithm>
#include <random>
#include <unordered_set>

#include "ddmapd/distance.hpp"

namespace ddmapd {

LayoutKind parse_layout_kind(const std::string& s) {
    if (s == "r2r" || s == "R2R") return LayoutKind::R2R;
    if (s == "s2w" || s == "S2W") return LayoutKind::S2W;
    if (s == "dne" || s == "DnE" || s == "DNE") return LayoutKind::DnE;
    throw ParseError("unknown layout kind: " + s);
}

std::string layout_kind_name(LayoutKind k) {
    switch (k) {
        case LayoutKind::R2R: return "r2r";
        case LayoutKind::S2W: return "s2w";
        case LayoutKind::DnE: return "dne";
    }
    return "?";
}

namespace {

std::vector<Vertex> all_free_cells(const GridMap& map) {
    std::vector<Vertex> cells;
    for (Vertex v = 0; v < map.size(); ++v)
        if (!map.blocked(v)) cells.push_back(v);
    return cells;
}

// Storage cells: paired shelf columns separated by single aisles, with a
// horizontal aisle every sixth row, offset from the map border.
bool storage_cell(const GridMap& map, Vertex v, int col_from) {
    const Cell c = map.to_cell(v);
    if (c.row < 1 || c.row >= map.height() - 1) return false;
    if (c.col < col_from || c.col >= map.width() - 1) return false;
    if (c.row % 6 == 0) return false;
    return (c.col - col_from) % 3 != 0;
}

template <typename Rng>
std::vector<Vertex> draw(std::vector<Vertex>& pool, size_t count, Rng& rng) {
    if (pool.size() < count) throw InvariantError("layout generator: cell pool exhausted");
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<Vertex> out(pool.begin(), pool.begin() + static_cast<long>(count));
    pool.erase(pool.begin(), pool.begin() + static_cast<long>(count));
    return out;
}

Instance generate_once(const LayoutSpec& spec, uint64_t seed) {
    Instance inst;
    inst.map = GridMap(spec.width, spec.height);
    std::mt19937 rng(static_cast<uint32_t>(seed));
    const std::vector<Vertex> free_cells = all_free_cells(inst.map);
    const int M = static_cast<int>(spec.density * static_cast<double>(free_cells.size()) + 0.5);
    if (M < spec.agents)
        throw InvariantError("layout generator: density leaves fewer shelves than agents");

    inst.shelves.resize(static_cast<size_t>(M));
    std::vector<Vertex> pool = free_cells;

    if (spec.kind == LayoutKind::R2R) {
        const auto pickups = draw(pool, static_cast<size_t>(M), rng);
        const int rearranged = M / 2;
        const auto deliveries = draw(pool, static_cast<size_t>(rearranged), rng);
        for (int s = 0; s < M; ++s) {
            inst.shelves[static_cast<size_t>(s)].pickup = pickups[static_cast<size_t>(s)];
            inst.shelves[static_cast<size_t>(s)].delivery =
                s < rearranged ? deliveries[static_cast<size_t>(s)] : pickups[static_cast<size_t>(s)];
        }
    } else if (spec.kind == LayoutKind::S2W) {
        // Staging strip on the left, storage aisles on the right.
        const int strip_cols = std::max(1, (M + spec.height - 1) / spec.height);
        std::vector<Vertex> strip;
        for (int ccol = 0; ccol < strip_cols && static_cast<int>(strip.size()) < M; ++ccol)
            for (int r = 0; r < spec.height && static_cast<int>(strip.size()) < M; ++r)
                strip.push_back(inst.map.to_vertex(Cell{r, ccol}));
        std::vector<Vertex> storage;
        for (Vertex v : free_cells)
            if (storage_cell(inst.map, v, strip_cols + 2)) storage.push_back(v);
        if (static_cast<int>(storage.size()) < M)
            throw InvariantError("layout generator: not enough storage cells for S2W");
        std::shuffle(storage.begin(), storage.end(), rng);
        for (int s = 0; s < M; ++s) {
            inst.shelves[static_cast<size_t>(s)].pickup = strip[static_cast<size_t>(s)];
            inst.shelves[static_cast<size_t>(s)].delivery = storage[static_cast<size_t>(s)];
        }
        std::unordered_set<Vertex> used(strip.begin(), strip.begin() + M);
        for (int s = 0; s < M; ++s) used.insert(inst.shelves[static_cast<size_t>(s)].delivery);
        pool.clear();
        for (Vertex v : free_cells)
            if (!used.count(v)) pool.push_back(v);
    } else {  // DnE
        std::vector<Vertex> storage;
        for (Vertex v : free_cells)
            if (storage_cell(inst.map, v, 1)) storage.push_back(v);
        if (static_cast<int>(storage.size()) < M)
            throw InvariantError("layout generator: not enough storage cells for DnE");
        std::shuffle(storage.begin(), storage.end(), rng);
        const int stationary =
            std::min(M, static_cast<int>(spec.stationary_fraction * M + 0.5));
        std::unordered_set<Vertex> used;
        for (int s = 0; s < M; ++s) {
            inst.shelves[static_cast<size_t>(s)].delivery = storage[static_cast<size_t>(s)];
            used.insert(storage[static_cast<size_t>(s)]);
        }
        // Stationary shelves sit at their delivery; the rest start outside
        // the storage zones.
        std::vector<Vertex> outside;
        for (Vertex v : free_cells)
            if (!storage_cell(inst.map, v, 1) && !used.count(v)) outside.push_back(v);
        std::shuffle(outside.begin(), outside.end(), rng);
        size_t oi = 0;
        for (int s = 0; s < M; ++s) {
            if (s < stationary) {
                inst.shelves[static_cast<size_t>(s)].pickup =
                    inst.shelves[static_cast<size_t>(s)].delivery;
            } else {
                if (oi >= outside.size())
                    throw InvariantError("layout generator: not enough non-storage cells for DnE");
                inst.shelves[static_cast<size_t>(s)].pickup = outside[oi++];
            }
        }
        used.clear();
        for (int s = 0; s < M; ++s) {
            used.insert(inst.shelves[static_cast<size_t>(s)].pickup);
            used.insert(inst.shelves[static_cast<size_t>(s)].delivery);
        }
        pool.clear();
        for (Vertex v : free_cells)
            if (!used.count(v)) pool.push_back(v);
    }

    // Agent starts on cells free of pickups and deliveries, so a safe
    // 1-robust plan can exist.
    if (spec.kind == LayoutKind::R2R) {
        std::unordered_set<Vertex> used;
        for (int s = 0; s < M; ++s) {
            used.insert(inst.shelves[static_cast<size_t>(s)].pickup);
            used.insert(inst.shelves[static_cast<size_t>(s)].delivery);
        }
        pool.clear();
        for (Vertex v : free_cells)
            if (!used.count(v)) pool.push_back(v);
        std::shuffle(pool.begin(), pool.end(), rng);
    }
    inst.agent_starts = draw(pool, static_cast<size_t>(spec.agents), rng);
    inst.check_valid();
    return inst;
}

}  // namespace

namespace {

// Stationary shelves never move, so every rearranged shelf must reach its
// delivery with them (and the agent homes) treated as walls.
bool movers_reachable(const Instance& inst) {
    std::vector<char> removed(static_cast<size_t>(inst.map.size()), 0);
    for (Vertex a : inst.agent_starts) removed[static_cast<size_t>(a)] = 1;
    for (const Shelf& s : inst.shelves)
        if (s.pickup == s.delivery) removed[static_cast<size_t>(s.pickup)] = 1;
    for (const Shelf& s : inst.shelves) {
        if (s.pickup == s.delivery) continue;
        const auto d = bfs_distances(inst.map, s.pickup, &removed);
        if (d[static_cast<size_t>(s.delivery)] >= kInfTime) return false;
    }
    return true;
}

}  // namespace

Instance generate_instance(const LayoutSpec& spec) {
    constexpr int kMaxAttempts = 64;
    std::string last_error;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        try {
            Instance inst = generate_once(spec, spec.seed + 0x9e3779b9ull * attempt);
            if (!check_well_formed(inst).well_formed()) continue;
            if (!movers_reachable(inst)) continue;
            return inst;
        } catch (const InvariantError& e) {
            last_error = e.what();
        }
    }
    throw InvariantError("generate_instance: no well-formed instance after " +
                         std::to_string(kMaxAttempts) + " attempts" +
                         (last_error.empty() ? "" : (": " + last_error)));
}

}  // namespace ddmapd
