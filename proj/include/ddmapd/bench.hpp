#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ddmapd/instance.hpp"
#include "ddmapd/layouts.hpp"

namespace ddmapd {

struct BenchRun {
    LayoutSpec spec;                   // seed filled per instance
    uint64_t seed_begin = 0;
    uint64_t seed_end = 0;             // inclusive
    std::vector<std::string> methods;  // "baseline", "crest", "crest+all", ...
    int overhead_delta = 0;
    int plan_restarts = 50;
};

struct BenchRow {
    std::string map;   // e.g. "24x24"
    std::string kind;
    uint64_t seed = 0;
    int agents = 0;
    int shelves = 0;
    std::string method;
    long long cost = 0;
    long long norm_cost = 0;
    int makespan = 0;
    double norm_makespan = 0.0;
    double switch_per_shelf = 0.0;
    double runtime_s = 0.0;
    bool valid = false;
    bool timeout = false;
};

// Per instance: generate, seed-plan once, run every method against the same
// plan, validate, and compute metrics. Timeout or failed rows are flagged,
// never dropped. Instances run on a bounded worker pool.
std::vector<BenchRow> run_benchmark(const std::vector<BenchRun>& suite, int jobs,
                                    double budget_s, std::ostream* progress = nullptr);

// CSV with the fixed column set plus reduction-vs-baseline percentages.
void write_csv(const std::vector<BenchRow>& rows, std::ostream& os);

// Minimal TOML subset: [[run]] tables with integer/float/string/bool scalars
// and arrays of strings. Enough for suite files; anything else errors.
std::vector<BenchRun> load_suite(const std::string& path);

// Applies method flags ("crest+str+gtr", "crest+all", "baseline") to a config.
ExecutionConfig method_config(const std::string& method, int overhead_delta);

}  // namespace ddmapd
