#include "ddmapd/mlsipp.hpp"

#include <algorithm>
#include <array>
#include <queue>
#include <unordered_map>

#include "ddmapd/distance.hpp"

namespace ddmapd {

namespace {

using Interval = std::pair<int, int>;

std::optional<TimedPath> single_label_return(const GridMap& map_, const ReservationTable& res_,
                                             int skip_agent, int skip_shelf, Vertex from, int t0,
                                             Vertex goal);


struct State {
    int8_t label = 0;  // 0 = approach, 1 = carry
    int pos = 0;       // vertex (label 0) or segment index (label 1)
    int iv = 0;        // interval index at pos
    int g = 0;         // arrival time at pos within iv
    int waits = 0;     // accumulated carry waiting, tie-break only
    int parent = -1;
    int lift_start = -1;  // set on the state entering label 1
    bool rigid = false;   // baseline: whole carry encoded in one jump
};

struct QueueEntry {
    int f, g, waits, label, pos, id;
    bool operator>(const QueueEntry& o) const {
        if (f != o.f) return f > o.f;
        if (g != o.g) return g > o.g;
        if (waits != o.waits) return waits > o.waits;
        if (label != o.label) return label < o.label;  // prefer carrying states
        if (pos != o.pos) return pos > o.pos;
        return id > o.id;
    }
};

class CarrySearch {
  public:
    CarrySearch(const GridMap& map, const CarryQuery& q, const ReservationTable& res)
        : map_(map), q_(q), res_(res), L_(static_cast<int>(q.segment.size())) {
        approach_h_ = bfs_distances(map_, q_.segment.front());
        carry_iv_.resize(static_cast<size_t>(L_));
        for (int j = 0; j < L_; ++j)
            carry_iv_[static_cast<size_t>(j)] =
                res_.safe_intervals_merged(q_.segment[static_cast<size_t>(j)], q_.agent, q_.shelf);
        shelf_free_after_ = 0;
        for (const auto& [lo, hi] :
             res_.blocked_intervals(ReservationTable::kShelfLayer, q_.segment.back(), q_.agent,
                                    q_.shelf))
            shelf_free_after_ = std::max(shelf_free_after_, hi >= kInfTime ? kInfTime : hi + 1);
    }

    std::optional<PlannedCarry> run();

  private:
    const std::vector<Interval>& approach_intervals(Vertex v) {
        auto it = approach_cache_.find(v);
        if (it == approach_cache_.end())
            it = approach_cache_
                     .emplace(v, res_.safe_intervals(ReservationTable::kAgentLayer, v, q_.agent,
                                                     q_.shelf))
                     .first;
        return it->second;
    }

    int heuristic(const State& s) const {
        if (s.label == 0) {
            const int d = approach_h_[static_cast<size_t>(s.pos)];
            if (d >= kInfTime) return kInfTime;
            return d + q_.overhead_delta + (L_ - 1);
        }
        return L_ - 1 - s.pos;
    }

    int intern(State s);
    void push(int id);
    bool agent_edge_ok(Vertex from, Vertex to, int t) const {
        return !res_.edge_blocked(ReservationTable::kAgentLayer, from, to, t, q_.agent, q_.shelf);
    }
    bool carry_edge_ok(Vertex from, Vertex to, int t) const {
        return agent_edge_ok(from, to, t) &&
               !res_.edge_blocked(ReservationTable::kShelfLayer, from, to, t, q_.agent, q_.shelf);
    }
    bool place_feasible(int arrival, const Interval& iv) const {
        if (arrival + q_.overhead_delta > iv.second) return false;
        return shelf_free_after_ <= arrival;
    }

    void expand_approach(int id);
    void expand_carry(int id);
    void try_lift(int id);
    void try_rigid_carry(int id);
    std::optional<PlannedCarry> assemble(int goal_id);

    const GridMap& map_;
    const CarryQuery& q_;
    const ReservationTable& res_;
    const int L_;
    std::vector<int> approach_h_;
    std::vector<std::vector<Interval>> carry_iv_;
    std::unordered_map<Vertex, std::vector<Interval>> approach_cache_;
    int shelf_free_after_ = 0;

    std::vector<State> states_;
    std::vector<char> expanded_;
    std::unordered_map<int64_t, int> seen_;  // (label,pos,iv) -> state id
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<QueueEntry>> open_;

    static int64_t key(int label, int pos, int iv) {
        return (static_cast<int64_t>(label) << 56) ^ (static_cast<int64_t>(pos) << 24) ^ iv;
    }
};

int CarrySearch::intern(State s) {
    const int64_t k = key(s.label, s.pos, s.iv);
    auto it = seen_.find(k);
    if (it == seen_.end()) {
        const int id = static_cast<int>(states_.size());
        states_.push_back(s);
        expanded_.push_back(0);
        seen_.emplace(k, id);
        push(id);
        return id;
    }
    State& cur = states_[static_cast<size_t>(it->second)];
    if (s.g < cur.g || (s.g == cur.g && s.waits < cur.waits)) {
        cur = s;
        expanded_[static_cast<size_t>(it->second)] = 0;
        push(it->second);
    }
    return it->second;
}

void CarrySearch::push(int id) {
    const State& s = states_[static_cast<size_t>(id)];
    const int h = heuristic(s);
    if (h >= kInfTime) return;
    open_.push(QueueEntry{s.g + h, s.g, s.waits, s.label, s.pos, id});
}

void CarrySearch::expand_approach(int id) {
    const State s = states_[static_cast<size_t>(id)];
    const Interval iv = approach_intervals(static_cast<Vertex>(s.pos))[static_cast<size_t>(s.iv)];
    std::array<Vertex, 4> nb;
    const int n = map_.neighbors(static_cast<Vertex>(s.pos), nb);
    for (int i = 0; i < n; ++i) {
        const Vertex to = nb[static_cast<size_t>(i)];
        const auto& tos = approach_intervals(to);
        for (int j = 0; j < static_cast<int>(tos.size()); ++j) {
            const Interval tiv = tos[static_cast<size_t>(j)];
            if (tiv.second < s.g + 1) continue;
            int t = std::max(s.g + 1, tiv.first);
            if (t - 1 > iv.second) break;
            while (t <= tiv.second && t - 1 <= iv.second &&
                   !agent_edge_ok(static_cast<Vertex>(s.pos), to, t - 1))
                ++t;
            if (t > tiv.second || t - 1 > iv.second) continue;
            intern(State{0, to, j, t, s.waits, id, -1, false});
        }
    }
    if (s.pos == q_.segment.front()) {
        if (q_.allow_carry_wait)
            try_lift(id);
        else
            try_rigid_carry(id);
    }
}

void CarrySearch::try_lift(int id) {
    const State s = states_[static_cast<size_t>(id)];
    const Interval iv = approach_intervals(static_cast<Vertex>(s.pos))[static_cast<size_t>(s.iv)];
    const int lift_start = s.g;
    const int lift_end = lift_start + q_.overhead_delta;
    if (lift_end > iv.second) return;
    const auto& civ = carry_iv_[0];
    for (int j = 0; j < static_cast<int>(civ.size()); ++j) {
        const Interval c = civ[static_cast<size_t>(j)];
        if (lift_end < c.first || lift_end > c.second) continue;
        intern(State{1, 0, j, lift_end, s.waits, id, lift_start, false});
        break;
    }
}

// Forward-only execution commits the whole carry at a fixed cadence; try
// successive lift times within this approach interval. Past the latest
// finite reservation on the segment every cadence is clear, so the scan is
// bounded.
void CarrySearch::try_rigid_carry(int id) {
    const State s = states_[static_cast<size_t>(id)];
    const Interval iv = approach_intervals(static_cast<Vertex>(s.pos))[static_cast<size_t>(s.iv)];
    if (shelf_free_after_ >= kInfTime) return;  // something parks on s.new forever
    int cap = shelf_free_after_;
    for (int layer = 0; layer < 2; ++layer)
        for (int j = 0; j < L_; ++j)
            for (const auto& [lo, hi] : res_.blocked_intervals(
                     static_cast<ReservationTable::Layer>(layer),
                     q_.segment[static_cast<size_t>(j)], q_.agent, q_.shelf)) {
                if (hi >= kInfTime) return;  // parked on the segment forever
                cap = std::max(cap, hi + 1);
            }

    auto cell_free = [&](Vertex v, int t) {
        return !res_.vertex_blocked(ReservationTable::kAgentLayer, v, t, q_.agent, q_.shelf) &&
               !res_.vertex_blocked(ReservationTable::kShelfLayer, v, t, q_.agent, q_.shelf);
    };
    const int delta = q_.overhead_delta;
    // Index j is entered at lift_end + j, which may not precede its floor.
    int first_start = s.g;
    if (!q_.segment_floors.empty())
        for (int j = 1; j < L_; ++j)
            first_start =
                std::max(first_start, q_.segment_floors[static_cast<size_t>(j)] - j - delta);
    const int last_start = std::min(iv.second - delta, std::max(first_start, cap));
    for (int lift_start = first_start; lift_start <= last_start; ++lift_start) {
        const int lift_end = lift_start + delta;
        const int arrival = lift_end + L_ - 1;
        bool ok = true;
        for (int t = lift_start; t <= lift_end && ok; ++t)
            if (!cell_free(q_.segment.front(), t)) ok = false;
        for (int j = 1; j < L_ && ok; ++j) {
            const Vertex from = q_.segment[static_cast<size_t>(j - 1)];
            const Vertex to = q_.segment[static_cast<size_t>(j)];
            const int t = lift_end + j;
            if (!cell_free(to, t) || !carry_edge_ok(from, to, t - 1)) ok = false;
        }
        if (ok && shelf_free_after_ > arrival) ok = false;
        for (int t = arrival + 1; t <= arrival + delta && ok; ++t)
            if (res_.vertex_blocked(ReservationTable::kAgentLayer, q_.segment.back(), t, q_.agent,
                                    q_.shelf))
                ok = false;
        if (!ok) continue;
        State goal;
        goal.label = 1;
        goal.pos = L_ - 1;
        goal.iv = 0;
        goal.g = arrival;
        goal.waits = states_[static_cast<size_t>(id)].waits;
        goal.parent = id;
        goal.lift_start = lift_start;
        goal.rigid = true;
        // bypass dedup: rigid goals are unique per parent/lift time
        const int gid = static_cast<int>(states_.size());
        states_.push_back(goal);
        expanded_.push_back(0);
        push(gid);
        return;
    }
}

void CarrySearch::expand_carry(int id) {
    const State s = states_[static_cast<size_t>(id)];
    const Interval iv = carry_iv_[static_cast<size_t>(s.pos)][static_cast<size_t>(s.iv)];
    auto step = [&](int to_idx) {
        const Vertex from = q_.segment[static_cast<size_t>(s.pos)];
        const Vertex to = q_.segment[static_cast<size_t>(to_idx)];
        const auto& tos = carry_iv_[static_cast<size_t>(to_idx)];
        const int floor = q_.segment_floors.empty()
                              ? 0
                              : q_.segment_floors[static_cast<size_t>(to_idx)];
        for (int j = 0; j < static_cast<int>(tos.size()); ++j) {
            const Interval tiv = tos[static_cast<size_t>(j)];
            if (tiv.second < s.g + 1) continue;
            int t = std::max({s.g + 1, floor, tiv.first});
            if (t - 1 > iv.second) break;
            if (!q_.allow_carry_wait && t != s.g + 1) break;
            while (t <= tiv.second && t - 1 <= iv.second && !carry_edge_ok(from, to, t - 1)) {
                if (!q_.allow_carry_wait) break;
                ++t;
            }
            if (t > tiv.second || t - 1 > iv.second || !carry_edge_ok(from, to, t - 1)) continue;
            const int waits = s.waits + (t - s.g - 1);
            intern(State{1, to_idx, j, t, waits, id, -1, false});
        }
    };
    if (s.pos + 1 < L_) step(s.pos + 1);
    if (q_.allow_carry_backward && s.pos > 0) step(s.pos - 1);
}

std::optional<TimedPath> single_label_return(const GridMap& map_, const ReservationTable& res_,
                                             int skip_agent, int skip_shelf, Vertex from, int t0,
                                             Vertex goal) {
    // Single-label SIPP on the agent layer toward the goal, parking there
    // forever.
    struct DState {
        Vertex v;
        int iv;
        int g;
        int parent;
    };
    std::vector<DState> states;
    std::unordered_map<int64_t, int> seen;
    auto dkey = [](Vertex v, int iv) { return (static_cast<int64_t>(v) << 20) ^ iv; };
    std::unordered_map<Vertex, std::vector<Interval>> cache;
    auto intervals = [&](Vertex v) -> const std::vector<Interval>& {
        auto it = cache.find(v);
        if (it == cache.end())
            it = cache
                     .emplace(v, res_.safe_intervals(ReservationTable::kAgentLayer, v, skip_agent,
                                                     skip_shelf))
                     .first;
        return it->second;
    };
    const std::vector<int> h = bfs_distances(map_, goal);

    using Entry = std::pair<std::pair<int, int>, int>;  // ((f, g), id)
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> open;

    const auto& start_ivs = intervals(from);
    int siv = -1;
    for (int j = 0; j < static_cast<int>(start_ivs.size()); ++j)
        if (start_ivs[static_cast<size_t>(j)].first <= t0 &&
            t0 <= start_ivs[static_cast<size_t>(j)].second)
            siv = j;
    if (siv < 0) return std::nullopt;
    states.push_back(DState{from, siv, t0, -1});
    seen.emplace(dkey(from, siv), 0);
    if (h[static_cast<size_t>(from)] >= kInfTime) return std::nullopt;
    open.push({{t0 + h[static_cast<size_t>(from)], t0}, 0});
    std::vector<char> closed;

    while (!open.empty()) {
        const auto [fg, id] = open.top();
        open.pop();
        const DState s = states[static_cast<size_t>(id)];
        if (fg.second != s.g) continue;  // stale
        const Interval iv = intervals(s.v)[static_cast<size_t>(s.iv)];
        if (s.v == goal && iv.second >= kInfTime) {
            TimedPath path;
            path.t0 = t0;
            std::vector<std::pair<Vertex, int>> rev;
            int cur = id;
            while (cur >= 0) {
                rev.emplace_back(states[static_cast<size_t>(cur)].v,
                                 states[static_cast<size_t>(cur)].g);
                cur = states[static_cast<size_t>(cur)].parent;
            }
            std::reverse(rev.begin(), rev.end());
            for (size_t i = 0; i < rev.size(); ++i) {
                if (i == 0) {
                    path.cells.push_back(rev[i].first);
                    continue;
                }
                while (static_cast<int>(path.cells.size()) < rev[i].second - t0)
                    path.cells.push_back(rev[i - 1].first);
                path.cells.push_back(rev[i].first);
            }
            return path;
        }
        std::array<Vertex, 4> nb;
        const int n = map_.neighbors(s.v, nb);
        for (int i = 0; i < n; ++i) {
            const Vertex to = nb[static_cast<size_t>(i)];
            if (h[static_cast<size_t>(to)] >= kInfTime) continue;
            const auto& tos = intervals(to);
            for (int j = 0; j < static_cast<int>(tos.size()); ++j) {
                const Interval tiv = tos[static_cast<size_t>(j)];
                if (tiv.second < s.g + 1) continue;
                int t = std::max(s.g + 1, tiv.first);
                if (t - 1 > iv.second) break;
                while (t <= tiv.second && t - 1 <= iv.second && !!res_.edge_blocked(ReservationTable::kAgentLayer, s.v, to, t - 1, skip_agent, skip_shelf)) ++t;
                if (t > tiv.second || t - 1 > iv.second) continue;
                const int64_t k = dkey(to, j);
                auto it = seen.find(k);
                if (it == seen.end()) {
                    const int nid = static_cast<int>(states.size());
                    states.push_back(DState{to, j, t, id});
                    seen.emplace(k, nid);
                    open.push({{t + h[static_cast<size_t>(to)], t}, nid});
                } else if (t < states[static_cast<size_t>(it->second)].g) {
                    states[static_cast<size_t>(it->second)].g = t;
                    states[static_cast<size_t>(it->second)].parent = id;
                    open.push({{t + h[static_cast<size_t>(to)], t}, it->second});
                }
            }
        }
    }
    return std::nullopt;
}

std::optional<PlannedCarry> CarrySearch::assemble(int goal_id) {
    const State& goal = states_[static_cast<size_t>(goal_id)];
    PlannedCarry out;
    out.arrival = goal.g;
    out.place_end = goal.g + q_.overhead_delta;

    // Recover the state chain.
    std::vector<int> chain;
    for (int cur = goal_id; cur >= 0; cur = states_[static_cast<size_t>(cur)].parent)
        chain.push_back(cur);
    std::reverse(chain.begin(), chain.end());

    // Agent positions from t_avail onward.
    TimedPath ap;
    ap.t0 = q_.t_avail;
    ap.cells.push_back(q_.agent_cell);
    out.segment_first_time.assign(static_cast<size_t>(L_), -1);
    if (q_.start_carrying) {
        out.lift_start = q_.t_avail;
        out.lift_end = q_.t_avail;
        out.segment_first_time[0] = q_.t_avail;
    }

    auto pad_to = [&](int t, Vertex cell) {
        while (ap.t0 + static_cast<int>(ap.cells.size()) <= t) ap.cells.push_back(cell);
    };

    for (size_t i = 1; i < chain.size(); ++i) {
        const State& s = states_[static_cast<size_t>(chain[i])];
        const State& p = states_[static_cast<size_t>(chain[i - 1])];
        const Vertex pcell = p.label == 0 ? static_cast<Vertex>(p.pos)
                                          : q_.segment[static_cast<size_t>(p.pos)];
        if (s.rigid) {
            // lift wait then the fixed-cadence carry
            out.lift_start = s.lift_start;
            out.lift_end = s.lift_start + q_.overhead_delta;
            pad_to(out.lift_end, q_.segment.front());
            for (int j = 1; j < L_; ++j) {
                ap.cells.push_back(q_.segment[static_cast<size_t>(j)]);
            }
            for (int j = 0; j < L_; ++j)
                out.segment_first_time[static_cast<size_t>(j)] = out.lift_end + j;
        } else if (s.label == 1 && p.label == 0) {
            out.lift_start = s.lift_start;
            out.lift_end = s.g;
            pad_to(s.g, q_.segment.front());
            out.segment_first_time[0] = s.g;
        } else {
            const Vertex scell = s.label == 0 ? static_cast<Vertex>(s.pos)
                                              : q_.segment[static_cast<size_t>(s.pos)];
            pad_to(s.g - 1, pcell);
            ap.cells.push_back(scell);
            if (s.label == 1 && out.segment_first_time[static_cast<size_t>(s.pos)] < 0)
                out.segment_first_time[static_cast<size_t>(s.pos)] = s.g;
        }
    }
    pad_to(out.place_end, q_.segment.back());
    out.agent_path = ap;

    TimedPath carried;
    carried.t0 = out.lift_end;
    for (int t = out.lift_end; t <= out.arrival; ++t)
        carried.cells.push_back(ap.cells[static_cast<size_t>(t - ap.t0)]);
    out.carried = carried;

    auto dummy = single_label_return(map_, res_, q_.agent, q_.shelf, q_.segment.back(),
                                     out.place_end, q_.agent_home);
    if (!dummy) return std::nullopt;
    out.dummy = *dummy;
    return out;
}

std::optional<PlannedCarry> CarrySearch::run() {
    if (L_ < 2) throw InvariantError("plan_carry: empty carry segment");
    if (q_.start_carrying) {
        if (q_.agent_cell != q_.segment.front())
            throw InvariantError("plan_carry: carrying agent is not at segment[0]");
        const auto& civ = carry_iv_[0];
        int siv = -1;
        for (int j = 0; j < static_cast<int>(civ.size()); ++j)
            if (civ[static_cast<size_t>(j)].first <= q_.t_avail &&
                q_.t_avail <= civ[static_cast<size_t>(j)].second)
                siv = j;
        if (siv < 0)
            throw InvariantError("plan_carry: carried cell is reserved at the avail time");
        states_.push_back(State{1, 0, siv, q_.t_avail, 0, -1, q_.t_avail, false});
        expanded_.push_back(0);
        seen_.emplace(key(1, 0, siv), 0);
        push(0);
    } else {
        const auto& sivs = approach_intervals(q_.agent_cell);
        int siv = -1;
        for (int j = 0; j < static_cast<int>(sivs.size()); ++j)
            if (sivs[static_cast<size_t>(j)].first <= q_.t_avail &&
                q_.t_avail <= sivs[static_cast<size_t>(j)].second)
                siv = j;
        if (siv < 0)
            throw InvariantError("plan_carry: agent's current cell is reserved at its avail time");
        states_.push_back(State{0, q_.agent_cell, siv, q_.t_avail, 0, -1, -1, false});
        expanded_.push_back(0);
        seen_.emplace(key(0, q_.agent_cell, siv), 0);
        push(0);
    }

    while (!open_.empty()) {
        const QueueEntry e = open_.top();
        open_.pop();
        const State s = states_[static_cast<size_t>(e.id)];
        if (e.g != s.g || e.waits != s.waits) continue;  // stale entry
        if (expanded_[static_cast<size_t>(e.id)]) continue;
        expanded_[static_cast<size_t>(e.id)] = 1;

        if (s.label == 1 && s.pos == L_ - 1) {
            const bool ok =
                s.rigid ||
                place_feasible(s.g, carry_iv_[static_cast<size_t>(s.pos)][static_cast<size_t>(s.iv)]);
            if (ok) {
                if (auto planned = assemble(e.id)) return planned;
                // dummy failed from this arrival; keep searching
            }
            if (s.rigid) continue;
        }
        if (s.label == 0)
            expand_approach(e.id);
        else
            expand_carry(e.id);
    }
    return std::nullopt;
}

}  // namespace

std::optional<PlannedCarry> plan_carry(const GridMap& map, const CarryQuery& q,
                                       const ReservationTable& res) {
    CarrySearch search(map, q, res);
    return search.run();
}

std::optional<TimedPath> plan_return(const GridMap& map, const CarryQuery& q, Vertex from,
                                     int t0, const ReservationTable& res) {
    return single_label_return(map, res, q.agent, q.shelf, from, t0, q.agent_home);
}

}  // namespace ddmapd
