#include "ddmapd/bench.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "ddmapd/baseline.hpp"
#include "ddmapd/metrics.hpp"
#include "ddmapd/seed_planner.hpp"
#include "ddmapd/validator.hpp"

namespace ddmapd {

ExecutionConfig method_config(const std::string& method, int overhead_delta) {
    ExecutionConfig cfg;
    cfg.overhead_delta = overhead_delta;
    if (method == "baseline") return cfg;
    std::istringstream is(method);
    std::string part;
    bool first = true;
    while (std::getline(is, part, '+')) {
        if (first) {
            if (part != "crest") throw ParseError("unknown method: " + method);
            first = false;
            continue;
        }
        if (part == "str") cfg.use_str = true;
        else if (part == "ds") cfg.use_ds = true;
        else if (part == "gtr") cfg.use_gtr = true;
        else if (part == "all") cfg.use_str = cfg.use_ds = cfg.use_gtr = true;
        else throw ParseError("unknown method flag: " + part);
    }
    if (first) throw ParseError("unknown method: " + method);
    return cfg;
}

namespace {

struct Task {
    LayoutSpec spec;
    std::vector<std::string> methods;
    int overhead_delta = 0;
    int plan_restarts = 50;
};

std::vector<BenchRow> run_task(const Task& task, double budget_s) {
    std::vector<BenchRow> rows;
    const std::string map_name =
        std::to_string(task.spec.width) + "x" + std::to_string(task.spec.height);
    auto base_row = [&](const std::string& method) {
        BenchRow r;
        r.map = map_name;
        r.kind = layout_kind_name(task.spec.kind);
        r.seed = task.spec.seed;
        r.method = method;
        return r;
    };

    Instance inst;
    ShelfPlan plan;
    try {
        inst = generate_instance(task.spec);
        auto seeded = plan_shelves_prioritized(inst, task.spec.seed, task.plan_restarts);
        if (!seeded) throw InvariantError("seed planner failed");
        plan = std::move(*seeded);
    } catch (const std::exception&) {
        for (const auto& m : task.methods) {
            BenchRow r = base_row(m);
            r.timeout = true;  // flagged, not dropped
            rows.push_back(r);
        }
        return rows;
    }

    for (const auto& method : task.methods) {
        BenchRow r = base_row(method);
        r.agents = inst.num_agents();
        r.shelves = inst.num_shelves();
        try {
            ExecutionConfig cfg = method_config(method, task.overhead_delta);
            cfg.time_budget_s = budget_s;
            const ExecutionResult result = method == "baseline"
                                               ? run_decomp_pp(inst, plan, cfg)
                                               : run_crest(inst, plan, cfg);
            const MetricsReport m = compute_metrics(result, plan, inst.num_agents());
            r.cost = m.cost;
            r.norm_cost = m.norm_cost;
            r.makespan = m.makespan;
            r.norm_makespan = m.norm_makespan;
            r.switch_per_shelf = m.switch_per_shelf;
            r.runtime_s = m.runtime_s;
            r.valid = validate_execution(result, inst).ok() && result.audit.clean();
        } catch (const TimeoutError&) {
            r.timeout = true;
        }
        rows.push_back(r);
    }
    return rows;
}

}  // namespace

std::vector<BenchRow> run_benchmark(const std::vector<BenchRun>& suite, int jobs,
                                    double budget_s, std::ostream* progress) {
    std::vector<Task> tasks;
    for (const BenchRun& run : suite)
        for (uint64_t seed = run.seed_begin; seed <= run.seed_end; ++seed) {
            Task t;
            t.spec = run.spec;
            t.spec.seed = seed;
            t.methods = run.methods;
            t.overhead_delta = run.overhead_delta;
            t.plan_restarts = run.plan_restarts;
            tasks.push_back(t);
        }

    std::vector<std::vector<BenchRow>> results(tasks.size());
    std::atomic<size_t> next{0};
    std::atomic<size_t> done{0};
    std::mutex io_mutex;
    auto worker = [&]() {
        while (true) {
            const size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            results[i] = run_task(tasks[i], budget_s);
            const size_t d = done.fetch_add(1) + 1;
            if (progress) {
                std::lock_guard<std::mutex> lock(io_mutex);
                *progress << "\r" << d << "/" << tasks.size() << " instances" << std::flush;
            }
        }
    };
    const int n_workers = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
    std::vector<std::thread> threads;
    for (int i = 0; i < n_workers; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (progress) *progress << '\n';

    std::vector<BenchRow> rows;
    for (auto& rs : results)
        for (auto& r : rs) rows.push_back(std::move(r));
    return rows;
}

void write_csv(const std::vector<BenchRow>& rows, std::ostream& os) {
    os << "map,kind,seed,N,M,method,cost,norm_cost,makespan,norm_mksp,switch_per_shelf,"
          "runtime_s,valid,timeout,red_norm_cost_pct,red_norm_mksp_pct,red_switch_pct\n";
    auto baseline_of = [&rows](const BenchRow& r) -> const BenchRow* {
        for (const BenchRow& b : rows)
            if (b.method == "baseline" && b.kind == r.kind && b.seed == r.seed && b.map == r.map &&
                !b.timeout)
                return &b;
        return nullptr;
    };
    for (const BenchRow& r : rows) {
        os << r.map << ',' << r.kind << ',' << r.seed << ',' << r.agents << ',' << r.shelves << ','
           << r.method << ',' << r.cost << ',' << r.norm_cost << ',' << r.makespan << ','
           << std::fixed << std::setprecision(3) << r.norm_makespan << ',' << r.switch_per_shelf
           << ',' << std::setprecision(4) << r.runtime_s << ',' << (r.valid ? 1 : 0) << ','
           << (r.timeout ? 1 : 0);
        const BenchRow* b = r.method != "baseline" && !r.timeout ? baseline_of(r) : nullptr;
        auto pct = [](double base, double val) { return base != 0 ? 100.0 * (base - val) / base : 0.0; };
        if (b) {
            os << ',' << std::setprecision(2)
               << pct(static_cast<double>(b->norm_cost), static_cast<double>(r.norm_cost)) << ','
               << pct(b->norm_makespan, r.norm_makespan) << ','
               << pct(b->switch_per_shelf, r.switch_per_shelf);
        } else {
            os << ",,,";
        }
        os << '\n';
    }
}

namespace {

std::string strip(const std::string& s) {
    size_t b = s.find_first_not_of(" \t");
    size_t e = s.find_last_not_of(" \t");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<BenchRun> load_suite(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open suite file: " + path);
    std::vector<BenchRun> runs;
    BenchRun* cur = nullptr;
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& what) {
        throw ParseError("suite line " + std::to_string(lineno) + ": " + what);
    };
    while (std::getline(f, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = strip(line);
        if (line.empty()) continue;
        if (line == "[[run]]") {
            runs.emplace_back();
            cur = &runs.back();
            continue;
        }
        if (line.front() == '[') fail("only [[run]] tables are supported");
        const size_t eq = line.find('=');
        if (eq == std::string::npos) fail("expected key = value");
        if (!cur) fail("key outside of a [[run]] table");
        const std::string key = strip(line.substr(0, eq));
        std::string val = strip(line.substr(eq + 1));
        auto as_int = [&]() {
            try {
                return std::stoll(val);
            } catch (...) {
                fail("bad integer for " + key);
                return 0ll;
            }
        };
        auto as_double = [&]() {
            try {
                return std::stod(val);
            } catch (...) {
                fail("bad number for " + key);
                return 0.0;
            }
        };
        if (key == "kind") {
            if (val.size() < 2 || val.front() != '"' || val.back() != '"') fail("kind wants a string");
            cur->spec.kind = parse_layout_kind(val.substr(1, val.size() - 2));
        } else if (key == "width") {
            cur->spec.width = static_cast<int>(as_int());
        } else if (key == "height") {
            cur->spec.height = static_cast<int>(as_int());
        } else if (key == "density") {
            cur->spec.density = as_double();
        } else if (key == "agents") {
            cur->spec.agents = static_cast<int>(as_int());
        } else if (key == "seed_begin") {
            cur->seed_begin = static_cast<uint64_t>(as_int());
        } else if (key == "seed_end") {
            cur->seed_end = static_cast<uint64_t>(as_int());
        } else if (key == "overhead") {
            cur->overhead_delta = static_cast<int>(as_int());
        } else if (key == "restarts") {
            cur->plan_restarts = static_cast<int>(as_int());
        } else if (key == "stationary_fraction") {
            cur->spec.stationary_fraction = as_double();
        } else if (key == "methods") {
            if (val.size() < 2 || val.front() != '[' || val.back() != ']') fail("methods wants an array");
            std::string inner = val.substr(1, val.size() - 2);
            std::istringstream is(inner);
            std::string item;
            cur->methods.clear();
            while (std::getline(is, item, ',')) {
                item = strip(item);
                if (item.empty()) continue;
                if (item.size() < 2 || item.front() != '"' || item.back() != '"')
                    fail("methods wants quoted strings");
                cur->methods.push_back(item.substr(1, item.size() - 2));
            }
        } else {
            fail("unknown key '" + key + "'");
        }
    }
    for (const BenchRun& r : runs)
        if (r.methods.empty()) throw ParseError("suite: every [[run]] needs a methods array");
    return runs;
}

}  // namespace ddmapd
