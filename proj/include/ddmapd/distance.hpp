#pragma once

#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "ddmapd/core.hpp"
#include "ddmapd/grid.hpp"

namespace ddmapd {

// Shortest-path distances on the free-cell graph. Shelves and agents never
// block distance queries; only static obstacles do. Tables are computed per
// source on first use and cached; the cache is internally synchronized so a
// shared oracle can serve parallel runs.
class DistanceOracle {
  public:
    explicit DistanceOracle(const GridMap& map) : map_(&map) {}

    // Returns the shortest-path length in steps, or kInfTime when unreachable.
    int dist(Vertex from, Vertex to) const;

  private:
    const std::vector<int>& table(Vertex source) const;

    const GridMap* map_;
    mutable std::mutex mutex_;
    mutable std::unordered_map<Vertex, std::unique_ptr<std::vector<int>>> cache_;
};

// Single-source BFS over free cells; kInfTime for unreachable cells. When
// `removed` is non-null, cells flagged there are treated as blocked.
std::vector<int> bfs_distances(const GridMap& map, Vertex source,
                               const std::vector<char>* removed = nullptr);

}  // namespace ddmapd
