#include "ddmapd/instance.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace ddmapd {

namespace {

void require_free(const GridMap& map, const Cell& c, const std::string& what) {
    if (!map.in_bounds(c))
        throw InvariantError(what + " out of bounds: (" + std::to_string(c.row) + "," +
                             std::to_string(c.col) + ")");
    if (map.blocked(c))
        throw InvariantError(what + " on blocked cell: (" + std::to_string(c.row) + "," +
                             std::to_string(c.col) + ")");
}

}  // namespace

void Instance::check_valid() const {
    std::unordered_set<Vertex> seen;
    for (Vertex a : agent_starts) {
        require_free(map, map.to_cell(a), "agent start");
        if (!seen.insert(a).second) throw InvariantError("duplicate agent start");
    }
    std::unordered_set<Vertex> pickups;
    std::unordered_set<Vertex> deliveries;
    for (const Shelf& s : shelves) {
        require_free(map, map.to_cell(s.pickup), "shelf pickup");
        require_free(map, map.to_cell(s.delivery), "shelf delivery");
        if (!pickups.insert(s.pickup).second) throw InvariantError("duplicate shelf pickup");
        if (!deliveries.insert(s.delivery).second) throw InvariantError("duplicate shelf delivery");
        if (seen.count(s.pickup)) throw InvariantError("shelf pickup on agent start");
    }
    if (num_agents() < 1) throw InvariantError("instance has no agents");
    if (num_agents() > num_shelves())
        throw InvariantError("N > M (only non-trivial N <= M instances supported)");
}

WellFormedReport check_well_formed(const Instance& inst) {
    const GridMap& map = inst.map;
    WellFormedReport rep;

    // (b) two initially-empty vertices: free, no agent, no shelf pickup.
    std::unordered_set<Vertex> occupied(inst.agent_starts.begin(), inst.agent_starts.end());
    for (const Shelf& s : inst.shelves) occupied.insert(s.pickup);
    for (Vertex v = 0; v < map.size(); ++v)
        if (!map.blocked(v) && !occupied.count(v)) ++rep.empty_cell_count;
    rep.two_empty_cells = rep.empty_cell_count >= 2;

    // (a) connectivity after removing the starts of any N-1 agents.
    rep.connectivity_ok = true;
    const int total_free = map.free_cell_count();
    std::vector<char> removed(static_cast<size_t>(map.size()), 0);
    std::vector<char> visited(static_cast<size_t>(map.size()), 0);
    for (int keep = 0; keep < inst.num_agents(); ++keep) {
        std::fill(removed.begin(), removed.end(), 0);
        int removed_count = 0;
        for (int j = 0; j < inst.num_agents(); ++j)
            if (j != keep) {
                removed[static_cast<size_t>(inst.agent_starts[j])] = 1;
                ++removed_count;
            }
        std::fill(visited.begin(), visited.end(), 0);
        // BFS from the kept agent's start over free, non-removed cells.
        std::vector<Vertex> queue;
        queue.push_back(inst.agent_starts[keep]);
        visited[static_cast<size_t>(inst.agent_starts[keep])] = 1;
        int reached = 0;
        std::array<Vertex, 4> nb;
        for (size_t qi = 0; qi < queue.size(); ++qi) {
            const Vertex v = queue[qi];
            ++reached;
            const int n = map.neighbors(v, nb);
            for (int i = 0; i < n; ++i) {
                const Vertex u = nb[static_cast<size_t>(i)];
                if (visited[static_cast<size_t>(u)] || removed[static_cast<size_t>(u)]) continue;
                visited[static_cast<size_t>(u)] = 1;
                queue.push_back(u);
            }
        }
        if (reached != total_free - removed_count) {
            rep.connectivity_ok = false;
            rep.disconnecting_agent = keep;
            break;
        }
    }
    return rep;
}

void parse_scenario(const std::string& text, Instance& inst) {
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    bool saw_header = false;
    auto fail = [&](const std::string& what) {
        throw ParseError("scenario line " + std::to_string(lineno) + ": " + what);
    };
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (!saw_header) {
            int version = 0;
            if (key != "ddmapd" || !(ls >> version) || version != 1) fail("expected 'ddmapd 1'");
            saw_header = true;
            continue;
        }
        if (key == "agent") {
            Cell c;
            if (!(ls >> c.row >> c.col)) fail("bad agent line");
            if (!inst.map.in_bounds(c)) fail("agent out of bounds");
            inst.agent_starts.push_back(inst.map.to_vertex(c));
        } else if (key == "shelf") {
            Cell p, d;
            if (!(ls >> p.row >> p.col >> d.row >> d.col)) fail("bad shelf line");
            if (!inst.map.in_bounds(p) || !inst.map.in_bounds(d)) fail("shelf out of bounds");
            inst.shelves.push_back(Shelf{inst.map.to_vertex(p), inst.map.to_vertex(d)});
        } else {
            fail("unexpected token '" + key + "'");
        }
    }
    if (!saw_header) throw ParseError("scenario: missing 'ddmapd 1' header");
    inst.check_valid();
}

Instance load_instance(const std::string& map_path, const std::string& scen_path) {
    Instance inst;
    inst.map = load_map(map_path);
    std::ifstream f(scen_path);
    if (!f) throw ParseError("cannot open scenario file: " + scen_path);
    std::ostringstream ss;
    ss << f.rdbuf();
    parse_scenario(ss.str(), inst);
    return inst;
}

void save_scenario(const Instance& inst, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ParseError("cannot write scenario file: " + path);
    f << "ddmapd 1\n";
    for (Vertex a : inst.agent_starts) {
        const Cell c = inst.map.to_cell(a);
        f << "agent " << c.row << ' ' << c.col << '\n';
    }
    for (const Shelf& s : inst.shelves) {
        const Cell p = inst.map.to_cell(s.pickup);
        const Cell d = inst.map.to_cell(s.delivery);
        f << "shelf " << p.row << ' ' << p.col << ' ' << d.row << ' ' << d.col << '\n';
    }
}

}  // namespace ddmapd
