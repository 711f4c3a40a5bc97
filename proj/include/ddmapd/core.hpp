#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddmapd {

// Vertices are row-major cell indices into the grid; Cell is the (row, col)
// form used by file formats and debug output. Row grows downward.
using Vertex = int;

struct Cell {
    int row = 0;
    int col = 0;
    bool operator==(const Cell&) const = default;
    bool operator<(const Cell& o) const {
        return row != o.row ? row < o.row : col < o.col;
    }
};

// Sentinel for "unreachable" / "not yet released". Kept well below INT_MAX so
// additions never overflow.
inline constexpr int kInfTime = std::numeric_limits<int>::max() / 4;

// A path that starts at time t0; cells[i] is the position at time t0 + i.
struct TimedPath {
    int t0 = 0;
    std::vector<Vertex> cells;

    bool empty() const { return cells.empty(); }
    int end_time() const { return t0 + static_cast<int>(cells.size()) - 1; }
    Vertex back() const { return cells.back(); }
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvariantError : std::logic_error {
    using std::logic_error::logic_error;
};

struct TimeoutError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ddmapd
