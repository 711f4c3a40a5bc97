#include "ddmapd/logio.hpp"

#include <fstream>
#include <sstream>

namespace ddmapd {

namespace {

void write_timed_path(std::ostream& os, const GridMap& map, int t0,
                      const std::vector<Vertex>& cells) {
    os << cells.size();
    for (size_t i = 0; i < cells.size(); ++i) {
        const Cell c = map.to_cell(cells[i]);
        os << ' ' << t0 + static_cast<int>(i) << ' ' << c.row << ' ' << c.col;
    }
    os << '\n';
}

}  // namespace

void save_execution_log(const ExecutionResult& result, const GridMap& map,
                        const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ParseError("cannot write log file: " + path);
    f << "ddmapd-log 1\n";
    f << "method " << result.method << '\n';
    f << "delta " << result.overhead_delta << '\n';
    f << "agents " << result.agent_paths.size() << '\n';
    f << "shelves " << result.shelf_paths.size() << '\n';
    for (const auto& r : result.rounds) f << "round " << r.agent << ' ' << r.shelf << '\n';
    for (size_t a = 0; a < result.agent_paths.size(); ++a) {
        f << "path agent " << a << ' ';
        write_timed_path(f, map, 0, result.agent_paths[a]);
    }
    for (size_t s = 0; s < result.shelf_paths.size(); ++s) {
        f << "path shelf " << s << ' ';
        write_timed_path(f, map, 0, result.shelf_paths[s]);
    }
    for (size_t a = 0; a < result.leftover_dummies.size(); ++a) {
        const TimedPath& d = result.leftover_dummies[a];
        if (d.empty()) continue;
        f << "dummy " << a << ' ';
        write_timed_path(f, map, d.t0, d.cells);
    }
    for (const auto& e : result.events)
        f << (e.is_lift ? "lift " : "place ") << e.agent << ' ' << e.shelf << ' ' << e.time << '\n';
    const DependencyGraph& dep = result.final_dep;
    for (int s = 0; s < dep.num_shelves(); ++s) {
        f << "traj " << s << ' ' << dep.waypoints(s).size();
        for (Vertex v : dep.waypoints(s)) {
            const Cell c = map.to_cell(v);
            f << ' ' << c.row << ' ' << c.col;
        }
        f << '\n';
    }
    for (const DepArc& a : dep.arcs()) {
        if (!a.validation) continue;
        const Cell c = map.to_cell(a.cell);
        f << "dep " << a.src.shelf << ' ' << a.src.index << ' ' << a.dst.shelf << ' ' << a.dst.index
          << ' ' << c.row << ' ' << c.col << '\n';
    }
}

ExecutionResult load_execution_log(const std::string& path, const GridMap& map) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open log file: " + path);
    ExecutionResult out;
    std::vector<std::vector<Vertex>> trajs;
    std::vector<DepArc> arcs;
    std::string line;
    int lineno = 0;
    bool saw_header = false;
    auto fail = [&](const std::string& what) {
        throw ParseError("log line " + std::to_string(lineno) + ": " + what);
    };
    auto read_cells = [&](std::istringstream& ls, int* t0) {
        size_t len = 0;
        if (!(ls >> len)) fail("bad path length");
        std::vector<Vertex> cells;
        for (size_t i = 0; i < len; ++i) {
            int t = 0;
            Cell c;
            if (!(ls >> t >> c.row >> c.col)) fail("short path");
            if (!map.in_bounds(c)) fail("cell out of bounds");
            if (i == 0 && t0) *t0 = t;
            cells.push_back(map.to_vertex(c));
        }
        return cells;
    };

    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (!saw_header) {
            int version = 0;
            if (key != "ddmapd-log" || !(ls >> version) || version != 1)
                fail("expected 'ddmapd-log 1'");
            saw_header = true;
            continue;
        }
        if (key == "method") {
            ls >> out.method;
        } else if (key == "delta") {
            ls >> out.overhead_delta;
        } else if (key == "agents") {
            size_t n = 0;
            ls >> n;
            out.agent_paths.resize(n);
            out.leftover_dummies.resize(n);
        } else if (key == "shelves") {
            size_t n = 0;
            ls >> n;
            out.shelf_paths.resize(n);
            trajs.resize(n);
        } else if (key == "round") {
            RoundRecord r;
            if (!(ls >> r.agent >> r.shelf)) fail("bad round");
            out.rounds.push_back(r);
        } else if (key == "path") {
            std::string kind;
            int id = 0;
            if (!(ls >> kind >> id)) fail("bad path header");
            auto cells = read_cells(ls, nullptr);
            if (kind == "agent") {
                if (id < 0 || id >= static_cast<int>(out.agent_paths.size())) fail("bad agent id");
                out.agent_paths[static_cast<size_t>(id)] = std::move(cells);
            } else if (kind == "shelf") {
                if (id < 0 || id >= static_cast<int>(out.shelf_paths.size())) fail("bad shelf id");
                out.shelf_paths[static_cast<size_t>(id)] = std::move(cells);
            } else {
                fail("bad path kind");
            }
        } else if (key == "dummy") {
            int id = 0;
            if (!(ls >> id) || id < 0 || id >= static_cast<int>(out.leftover_dummies.size()))
                fail("bad dummy id");
            TimedPath d;
            d.cells = read_cells(ls, &d.t0);
            out.leftover_dummies[static_cast<size_t>(id)] = std::move(d);
        } else if (key == "lift" || key == "place") {
            LiftPlaceEvent e;
            e.is_lift = key == "lift";
            if (!(ls >> e.agent >> e.shelf >> e.time)) fail("bad event");
            out.events.push_back(e);
        } else if (key == "traj") {
            int id = 0;
            size_t len = 0;
            if (!(ls >> id >> len) || id < 0 || id >= static_cast<int>(trajs.size()))
                fail("bad traj header");
            for (size_t i = 0; i < len; ++i) {
                Cell c;
                if (!(ls >> c.row >> c.col)) fail("short traj");
                trajs[static_cast<size_t>(id)].push_back(map.to_vertex(c));
            }
        } else if (key == "dep") {
            DepArc a;
            Cell c;
            if (!(ls >> a.src.shelf >> a.src.index >> a.dst.shelf >> a.dst.index >> c.row >> c.col))
                fail("bad dep arc");
            a.cell = map.to_vertex(c);
            arcs.push_back(a);
        } else {
            fail("unexpected token '" + key + "'");
        }
    }
    if (!saw_header) throw ParseError("log: missing header");
    out.final_dep = DependencyGraph::from_parts(std::move(trajs), arcs);
    return out;
}

}  // namespace ddmapd
