#include "ddmapd/seed_planner.hpp"

#include <algorithm>
#include <array>
#include <queue>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "ddmapd/distance.hpp"

namespace ddmapd {

namespace {

using Interval = std::pair<int, int>;

// Blocked (cell, time) intervals accumulated from earlier trajectories.
// Every shelf sits at its pickup at t = 0 whether planned yet or not, so
// those cells carry a fixed [0, 1] shadow for everyone else.
struct ShadowTable {
    std::unordered_map<Vertex, std::vector<Interval>> blocked;
    std::unordered_set<Vertex> initial_cells;
    Vertex own_start = -1;

    void occupy(Vertex v, int t) { blocked[v].emplace_back(std::max(0, t - 1), t + 1); }
    void hold(Vertex v, int t) { blocked[v].emplace_back(std::max(0, t - 1), kInfTime); }

    std::vector<Interval> safe(Vertex v) const {
        std::vector<Interval> iv;
        auto it = blocked.find(v);
        if (it != blocked.end()) iv = it->second;
        if (v != own_start && initial_cells.count(v)) iv.emplace_back(0, 1);
        std::sort(iv.begin(), iv.end());
        size_t w = 0;
        for (size_t i = 0; i < iv.size(); ++i) {
            if (w > 0 && iv[i].first <= iv[w - 1].second + 1)
                iv[w - 1].second = std::max(iv[w - 1].second, iv[i].second);
            else
                iv[w++] = iv[i];
        }
        iv.resize(w);
        std::vector<Interval> out;
        int t = 0;
        for (const auto& [lo, hi] : iv) {
            if (lo > t) out.emplace_back(t, lo - 1);
            if (hi >= kInfTime) return out;
            t = std::max(t, hi + 1);
        }
        out.emplace_back(t, kInfTime);
        return out;
    }
};

// Single-shelf SIPP on the reduced grid. Returns positions for t = 0..end.
std::optional<std::vector<Vertex>> sipp_shelf(const GridMap& map, const std::vector<char>& removed,
                                              Vertex from, Vertex to, const ShadowTable& table) {
    const std::vector<int> h = bfs_distances(map, to, &removed);
    if (h[static_cast<size_t>(from)] >= kInfTime) return std::nullopt;

    struct SState {
        Vertex v;
        int iv;
        int g;
        int parent;
    };
    std::vector<SState> states;
    std::unordered_map<int64_t, int> seen;
    std::unordered_map<Vertex, std::vector<Interval>> cache;
    auto intervals = [&](Vertex v) -> const std::vector<Interval>& {
        auto it = cache.find(v);
        if (it == cache.end()) it = cache.emplace(v, table.safe(v)).first;
        return it->second;
    };
    auto skey = [](Vertex v, int iv) { return (static_cast<int64_t>(v) << 20) ^ iv; };

    using Entry = std::pair<std::pair<int, int>, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> open;

    const auto& sivs = intervals(from);
    if (sivs.empty() || sivs.front().first > 0) return std::nullopt;
    states.push_back(SState{from, 0, 0, -1});
    seen.emplace(skey(from, 0), 0);
    open.push({{h[static_cast<size_t>(from)], 0}, 0});

    while (!open.empty()) {
        const auto [fg, id] = open.top();
        open.pop();
        const SState s = states[static_cast<size_t>(id)];
        if (fg.second != s.g) continue;
        const Interval iv = intervals(s.v)[static_cast<size_t>(s.iv)];
        if (s.v == to && iv.second >= kInfTime) {
            std::vector<Vertex> pos;
            std::vector<std::pair<Vertex, int>> rev;
            for (int cur = id; cur >= 0; cur = states[static_cast<size_t>(cur)].parent)
                rev.emplace_back(states[static_cast<size_t>(cur)].v,
                                 states[static_cast<size_t>(cur)].g);
            std::reverse(rev.begin(), rev.end());
            for (size_t i = 0; i < rev.size(); ++i) {
                if (i == 0) {
                    pos.push_back(rev[i].first);
                    continue;
                }
                while (static_cast<int>(pos.size()) < rev[i].second) pos.push_back(rev[i - 1].first);
                pos.push_back(rev[i].first);
            }
            return pos;
        }
        std::array<Vertex, 4> nb;
        const int n = map.neighbors(s.v, nb);
        for (int i = 0; i < n; ++i) {
            const Vertex u = nb[static_cast<size_t>(i)];
            if (removed[static_cast<size_t>(u)] || h[static_cast<size_t>(u)] >= kInfTime) continue;
            const auto& tos = intervals(u);
            for (int j = 0; j < static_cast<int>(tos.size()); ++j) {
                const Interval tiv = tos[static_cast<size_t>(j)];
                if (tiv.second < s.g + 1) continue;
                const int t = std::max(s.g + 1, tiv.first);
                if (t - 1 > iv.second) break;
                const int64_t k = skey(u, j);
                auto it = seen.find(k);
                if (it == seen.end()) {
                    const int nid = static_cast<int>(states.size());
                    states.push_back(SState{u, j, t, id});
                    seen.emplace(k, nid);
                    open.push({{t + h[static_cast<size_t>(u)], t}, nid});
                } else if (t < states[static_cast<size_t>(it->second)].g) {
                    states[static_cast<size_t>(it->second)].g = t;
                    states[static_cast<size_t>(it->second)].parent = id;
                    open.push({{t + h[static_cast<size_t>(u)], t}, it->second});
                }
            }
        }
    }
    return std::nullopt;
}

}  // namespace

namespace {

// A parked delivery is a permanent wall, so mover a must be planned before
// mover b whenever b's delivery alone (plus the static walls) severs a's
// route. Returns per-mover predecessor lists over mover-list indices, or
// nullopt when the relation is cyclic (no order can work).
std::optional<std::vector<std::vector<int>>> park_precedence(const Instance& inst,
                                                             const std::vector<char>& base_removed,
                                                             const std::vector<int>& movers) {
    const int n = static_cast<int>(movers.size());
    std::vector<std::vector<int>> preds(static_cast<size_t>(n));
    std::vector<char> removed = base_removed;
    for (int bi = 0; bi < n; ++bi) {
        const Shelf& b = inst.shelves[static_cast<size_t>(movers[static_cast<size_t>(bi)])];
        removed[static_cast<size_t>(b.delivery)] = 1;
        for (int ai = 0; ai < n; ++ai) {
            if (ai == bi) continue;
            const Shelf& a = inst.shelves[static_cast<size_t>(movers[static_cast<size_t>(ai)])];
            if (a.pickup == b.delivery || a.delivery == b.delivery) continue;
            const auto dist = bfs_distances(inst.map, a.pickup, &removed);
            if (dist[static_cast<size_t>(a.delivery)] >= kInfTime)
                preds[static_cast<size_t>(bi)].push_back(ai);
        }
        removed[static_cast<size_t>(b.delivery)] = 0;
    }
    // Cycle check via Kahn.
    std::vector<int> indeg(static_cast<size_t>(n), 0);
    std::vector<std::vector<int>> succs(static_cast<size_t>(n));
    for (int b = 0; b < n; ++b)
        for (int a : preds[static_cast<size_t>(b)]) {
            succs[static_cast<size_t>(a)].push_back(b);
            ++indeg[static_cast<size_t>(b)];
        }
    std::vector<int> queue;
    for (int i = 0; i < n; ++i)
        if (indeg[static_cast<size_t>(i)] == 0) queue.push_back(i);
    size_t seen = 0;
    for (size_t qi = 0; qi < queue.size(); ++qi) {
        ++seen;
        for (int nx : succs[static_cast<size_t>(queue[qi])])
            if (--indeg[static_cast<size_t>(nx)] == 0) queue.push_back(nx);
    }
    if (seen != static_cast<size_t>(n)) return std::nullopt;
    return preds;
}

// Random topological order: shuffle, then repeatedly emit a ready mover.
template <typename Rng>
std::vector<int> topo_shuffled(const std::vector<int>& movers,
                               const std::vector<std::vector<int>>& preds, Rng& rng) {
    const int n = static_cast<int>(movers.size());
    std::vector<int> perm(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<char> emitted(static_cast<size_t>(n), 0);
    std::vector<int> order;
    while (static_cast<int>(order.size()) < n) {
        bool progress = false;
        for (int i : perm) {
            if (emitted[static_cast<size_t>(i)]) continue;
            bool ready = true;
            for (int p : preds[static_cast<size_t>(i)])
                if (!emitted[static_cast<size_t>(p)]) {
                    ready = false;
                    break;
                }
            if (!ready) continue;
            emitted[static_cast<size_t>(i)] = 1;
            order.push_back(movers[static_cast<size_t>(i)]);
            progress = true;
        }
        if (!progress) throw InvariantError("topo_shuffled: cyclic precedence");
    }
    return order;
}

}  // namespace

std::optional<ShelfPlan> plan_shelves_prioritized(const Instance& inst, uint64_t seed,
                                                  int restarts, SeedPlanFailure* failure) {
    const GridMap& map = inst.map;
    std::vector<char> removed(static_cast<size_t>(map.size()), 0);
    for (Vertex a : inst.agent_starts) removed[static_cast<size_t>(a)] = 1;

    std::vector<int> movers;
    std::vector<int> stationary;
    for (int s = 0; s < inst.num_shelves(); ++s) {
        if (inst.shelves[static_cast<size_t>(s)].pickup ==
            inst.shelves[static_cast<size_t>(s)].delivery)
            stationary.push_back(s);
        else
            movers.push_back(s);
    }
    std::vector<char> with_stationary = removed;
    for (int s : stationary)
        with_stationary[static_cast<size_t>(inst.shelves[static_cast<size_t>(s)].pickup)] = 1;
    const auto preds = park_precedence(inst, with_stationary, movers);
    if (!preds) {
        if (failure) failure->blocking_shelf = -1;
        return std::nullopt;
    }

    std::mt19937 rng(static_cast<uint32_t>(seed));
    int last_blocking = -1;
    for (int attempt = 0; attempt <= restarts; ++attempt) {
        std::vector<int> order = topo_shuffled(movers, *preds, rng);
        // Failed shelves are usually boxed in by earlier deliveries; promote
        // the last blocker as far forward as its precedence allows.
        if (last_blocking >= 0) {
            auto it = std::find(order.begin(), order.end(), last_blocking);
            if (it != order.end()) {
                int bi = -1;
                for (size_t i = 0; i < movers.size(); ++i)
                    if (movers[i] == last_blocking) bi = static_cast<int>(i);
                order.erase(it);
                size_t lowest = 0;
                for (int p : (*preds)[static_cast<size_t>(bi)]) {
                    const auto pit = std::find(order.begin(), order.end(),
                                               movers[static_cast<size_t>(p)]);
                    if (pit != order.end())
                        lowest = std::max(lowest, static_cast<size_t>(pit - order.begin()) + 1);
                }
                order.insert(order.begin() + static_cast<long>(std::min(lowest, order.size())),
                             last_blocking);
            }
        }

        ShadowTable table;
        std::vector<std::vector<Vertex>> result(static_cast<size_t>(inst.num_shelves()));
        for (int s : stationary) {
            result[static_cast<size_t>(s)] = {inst.shelves[static_cast<size_t>(s)].pickup};
            table.hold(inst.shelves[static_cast<size_t>(s)].pickup, 0);
        }
        for (int s : movers)
            table.initial_cells.insert(inst.shelves[static_cast<size_t>(s)].pickup);
        bool ok = true;
        for (int s : order) {
            const Shelf& sh = inst.shelves[static_cast<size_t>(s)];
            table.own_start = sh.pickup;
            auto pos = sipp_shelf(map, removed, sh.pickup, sh.delivery, table);
            if (!pos) {
                ok = false;
                last_blocking = s;
                break;
            }
            for (size_t t = 0; t + 1 < pos->size(); ++t)
                table.occupy((*pos)[t], static_cast<int>(t));
            table.hold(pos->back(), static_cast<int>(pos->size()) - 1);
            result[static_cast<size_t>(s)] = std::move(*pos);
        }
        if (!ok) continue;

        ShelfPlan plan;
        for (int s = 0; s < inst.num_shelves(); ++s)
            plan.trajectories.push_back(ShelfTrajectory{s, std::move(result[static_cast<size_t>(s)])});
        return plan;
    }
    if (failure) failure->blocking_shelf = last_blocking;
    return std::nullopt;
}

}  // namespace ddmapd
