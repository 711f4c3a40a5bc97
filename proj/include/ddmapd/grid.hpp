#pragma once

#include <array>
#include <string>
#include <vector>

#include "ddmapd/core.hpp"

namespace ddmapd {

// 4-connected grid. Free cells induce the undirected graph the planners run
// on; '@'/'T' cells are static obstacles.
class GridMap {
  public:
    GridMap() = default;
    GridMap(int width, int height)
        : width_(width), height_(height), blocked_(static_cast<size_t>(width) * height, false) {
        if (width < 1 || height < 1) throw InvariantError("GridMap: non-positive dimensions");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    int size() const { return width_ * height_; }

    bool in_bounds(const Cell& c) const {
        return c.row >= 0 && c.row < height_ && c.col >= 0 && c.col < width_;
    }
    Vertex to_vertex(const Cell& c) const { return c.row * width_ + c.col; }
    Cell to_cell(Vertex v) const { return Cell{v / width_, v % width_}; }

    bool blocked(Vertex v) const { return blocked_[static_cast<size_t>(v)]; }
    bool blocked(const Cell& c) const { return blocked_[static_cast<size_t>(to_vertex(c))]; }
    void set_blocked(const Cell& c, bool b) { blocked_[static_cast<size_t>(to_vertex(c))] = b; }

    bool free_cell(Vertex v) const { return !blocked(v); }
    int free_cell_count() const;

    // Up to four free neighbors, in deterministic (up, left, right, down) order.
    int neighbors(Vertex v, std::array<Vertex, 4>& out) const;

    bool adjacent(Vertex a, Vertex b) const;

    std::string to_text() const;

  private:
    int width_ = 0;
    int height_ = 0;
    std::vector<bool> blocked_;
};

// MovingAI-style grid format: optional "type octile", then "height H",
// "width W", "map", then H rows of W glyphs from {., @, T}.
GridMap parse_map(const std::string& text);
GridMap load_map(const std::string& path);
void save_map(const GridMap& map, const std::string& path);

}  // namespace ddmapd
