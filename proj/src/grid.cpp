#include "ddmapd/grid.hpp"

#include <fstream>
#include <sstream>

namespace ddmapd {

int GridMap::free_cell_count() const {
    int n = 0;
    for (Vertex v = 0; v < size(); ++v)
        if (!blocked(v)) ++n;
    return n;
}

int GridMap::neighbors(Vertex v, std::array<Vertex, 4>& out) const {
    const int r = v / width_;
    const int c = v % width_;
    int n = 0;
    if (r > 0 && !blocked(v - width_)) out[n++] = v - width_;
    if (c > 0 && !blocked(v - 1)) out[n++] = v - 1;
    if (c + 1 < width_ && !blocked(v + 1)) out[n++] = v + 1;
    if (r + 1 < height_ && !blocked(v + width_)) out[n++] = v + width_;
    return n;
}

bool GridMap::adjacent(Vertex a, Vertex b) const {
    const Cell ca = to_cell(a);
    const Cell cb = to_cell(b);
    return std::abs(ca.row - cb.row) + std::abs(ca.col - cb.col) == 1;
}

std::string GridMap::to_text() const {
    std::ostringstream os;
    os << "type octile\nheight " << height_ << "\nwidth " << width_ << "\nmap\n";
    for (int r = 0; r < height_; ++r) {
        for (int c = 0; c < width_; ++c) os << (blocked(Cell{r, c}) ? '@' : '.');
        os << '\n';
    }
    return os.str();
}

GridMap parse_map(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    int width = -1, height = -1;
    bool saw_map = false;

    auto fail = [&](const std::string& what) {
        throw ParseError("map line " + std::to_string(lineno) + ": " + what);
    };

    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "type") {
            continue;  // octile tag, ignored
        } else if (key == "height") {
            if (!(ls >> height) || height < 1) fail("bad height");
        } else if (key == "width") {
            if (!(ls >> width) || width < 1) fail("bad width");
        } else if (key == "map") {
            saw_map = true;
            break;
        } else {
            fail("unexpected token '" + key + "'");
        }
    }
    if (width < 1 || height < 1 || !saw_map) {
        ++lineno;
        throw ParseError("map line " + std::to_string(lineno) + ": malformed header");
    }

    GridMap map(width, height);
    for (int r = 0; r < height; ++r) {
        if (!std::getline(is, line)) {
            ++lineno;
            fail("missing row " + std::to_string(r));
        }
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (static_cast<int>(line.size()) != width) fail("ragged row");
        for (int c = 0; c < width; ++c) {
            const char g = line[static_cast<size_t>(c)];
            if (g == '@' || g == 'T')
                map.set_blocked(Cell{r, c}, true);
            else if (g != '.')
                fail(std::string("unknown glyph '") + g + "'");
        }
    }
    return map;
}

GridMap load_map(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open map file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_map(ss.str());
}

void save_map(const GridMap& map, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ParseError("cannot write map file: " + path);
    f << map.to_text();
}

}  // namespace ddmapd
