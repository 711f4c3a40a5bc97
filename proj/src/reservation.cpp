#include "ddmapd/reservation.hpp"

#include <algorithm>

namespace ddmapd {

void ReservationTable::add_path(Layer layer, const TimedPath& path, bool hold_final, Owner owner) {
    if (path.empty()) return;
    auto& cells = cells_[layer];
    auto& edges = edges_[layer];
    for (size_t i = 0; i < path.cells.size(); ++i) {
        const int t = path.t0 + static_cast<int>(i);
        const Vertex v = path.cells[i];
        const bool last = i + 1 == path.cells.size();
        if (last && hold_final)
            cells[v].push_back(BlockInterval{t, kInfTime, owner});
        else
            cells[v].push_back(BlockInterval{t, t, owner});
        if (!last && path.cells[i + 1] != v)
            edges[edge_key(v, path.cells[i + 1], t)].push_back(owner);
    }
}

bool ReservationTable::vertex_blocked(Layer layer, Vertex v, int t, int skip_agent,
                                      int skip_shelf) const {
    auto it = cells_[layer].find(v);
    if (it == cells_[layer].end()) return false;
    for (const BlockInterval& b : it->second) {
        if (excluded(b.owner, skip_agent, skip_shelf)) continue;
        if (t >= b.lo && t <= b.hi) return true;
    }
    return false;
}

bool ReservationTable::edge_blocked(Layer layer, Vertex u, Vertex v, int t, int skip_agent,
                                    int skip_shelf) const {
    auto it = edges_[layer].find(edge_key(v, u, t));
    if (it == edges_[layer].end()) return false;
    for (const Owner& o : it->second)
        if (!excluded(o, skip_agent, skip_shelf)) return true;
    return false;
}

void ReservationTable::collect(Layer layer, Vertex v, int skip_agent, int skip_shelf,
                               std::vector<std::pair<int, int>>& out) const {
    auto it = cells_[layer].find(v);
    if (it == cells_[layer].end()) return;
    for (const BlockInterval& b : it->second)
        if (!excluded(b.owner, skip_agent, skip_shelf)) out.emplace_back(b.lo, b.hi);
}

namespace {

void sort_and_merge(std::vector<std::pair<int, int>>& iv) {
    std::sort(iv.begin(), iv.end());
    size_t w = 0;
    for (size_t i = 0; i < iv.size(); ++i) {
        if (w > 0 && iv[i].first <= iv[w - 1].second + 1)
            iv[w - 1].second = std::max(iv[w - 1].second, iv[i].second);
        else
            iv[w++] = iv[i];
    }
    iv.resize(w);
}

std::vector<std::pair<int, int>> complement(const std::vector<std::pair<int, int>>& blocked) {
    std::vector<std::pair<int, int>> safe;
    int t = 0;
    for (const auto& [lo, hi] : blocked) {
        if (lo > t) safe.emplace_back(t, lo - 1);
        if (hi >= kInfTime) return safe;
        t = std::max(t, hi + 1);
    }
    safe.emplace_back(t, kInfTime);
    return safe;
}

}  // namespace

std::vector<std::pair<int, int>> ReservationTable::blocked_intervals(Layer layer, Vertex v,
                                                                     int skip_agent,
                                                                     int skip_shelf) const {
    std::vector<std::pair<int, int>> iv;
    collect(layer, v, skip_agent, skip_shelf, iv);
    sort_and_merge(iv);
    return iv;
}

std::vector<std::pair<int, int>> ReservationTable::safe_intervals(Layer layer, Vertex v,
                                                                  int skip_agent,
                                                                  int skip_shelf) const {
    return complement(blocked_intervals(layer, v, skip_agent, skip_shelf));
}

std::vector<std::pair<int, int>> ReservationTable::safe_intervals_merged(Vertex v, int skip_agent,
                                                                         int skip_shelf) const {
    std::vector<std::pair<int, int>> iv;
    collect(kAgentLayer, v, skip_agent, skip_shelf, iv);
    collect(kShelfLayer, v, skip_agent, skip_shelf, iv);
    sort_and_merge(iv);
    return complement(iv);
}

}  // namespace ddmapd
