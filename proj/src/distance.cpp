#include "ddmapd/distance.hpp"

#include <array>

namespace ddmapd {

std::vector<int> bfs_distances(const GridMap& map, Vertex source, const std::vector<char>* removed) {
    std::vector<int> dist(static_cast<size_t>(map.size()), kInfTime);
    if (map.blocked(source) || (removed && (*removed)[static_cast<size_t>(source)])) return dist;
    std::vector<Vertex> queue;
    queue.push_back(source);
    dist[static_cast<size_t>(source)] = 0;
    std::array<Vertex, 4> nb;
    for (size_t qi = 0; qi < queue.size(); ++qi) {
        const Vertex v = queue[qi];
        const int dv = dist[static_cast<size_t>(v)];
        const int n = map.neighbors(v, nb);
        for (int i = 0; i < n; ++i) {
            const Vertex u = nb[static_cast<size_t>(i)];
            if (removed && (*removed)[static_cast<size_t>(u)]) continue;
            if (dist[static_cast<size_t>(u)] != kInfTime) continue;
            dist[static_cast<size_t>(u)] = dv + 1;
            queue.push_back(u);
        }
    }
    return dist;
}

int DistanceOracle::dist(Vertex from, Vertex to) const {
    if (from == to) return 0;
    return table(from)[static_cast<size_t>(to)];
}

const std::vector<int>& DistanceOracle::table(Vertex source) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(source);
    if (it == cache_.end()) {
        auto t = std::make_unique<std::vector<int>>(bfs_distances(*map_, source));
        it = cache_.emplace(source, std::move(t)).first;
    }
    return *it->second;
}

}  // namespace ddmapd
