#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ddmapd/baseline.hpp"
#include "ddmapd/bench.hpp"
#include "ddmapd/logio.hpp"
#include "ddmapd/metrics.hpp"
#include "ddmapd/seed_planner.hpp"
#include "ddmapd/validator.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitPlanFailure = 2;
constexpr int kExitUsage = 64;
constexpr int kExitIo = 66;

struct PlanArgs {
    std::string map, scen, out;
    uint64_t seed = 0;
    int restarts = 50;
};

struct ExecArgs {
    std::string map, scen, plan, out, method = "crest";
    bool str = false, ds = false, gtr = false;
    int overhead = 0;
    double budget = 0.0;
};

struct ValidateArgs {
    std::string map, scen, plan, log;
};

struct BenchArgs {
    std::string suite, out;
    int jobs = 1;
    double budget = 0.0;
};

struct GenArgs {
    std::string kind = "r2r", out;
    int width = 24, height = 24, agents = 8;
    double density = 0.2;
    uint64_t seed = 0;
};

struct DumpArgs {
    std::string map, scen, plan, out;
};

int cmd_plan(const PlanArgs& a) {
    const ddmapd::Instance inst = ddmapd::load_instance(a.map, a.scen);
    ddmapd::SeedPlanFailure fail;
    const auto plan = ddmapd::plan_shelves_prioritized(inst, a.seed, a.restarts, &fail);
    if (!plan) {
        std::cerr << "planning failed; blocking shelf " << fail.blocking_shelf << '\n';
        return kExitPlanFailure;
    }
    const auto validity = ddmapd::validate_shelf_plan(*plan, inst);
    if (!validity.ok()) {
        std::cerr << "internal error: emitted plan failed validation\n" << validity.describe();
        return kExitFail;
    }
    ddmapd::save_plan(*plan, inst.map, a.out);
    std::cout << "plan written to " << a.out << " (" << plan->num_shelves() << " shelves)\n";
    return kExitOk;
}

int cmd_execute(const ExecArgs& a) {
    const ddmapd::Instance inst = ddmapd::load_instance(a.map, a.scen);
    const ddmapd::ShelfPlan plan = ddmapd::load_plan(a.plan, inst.map);
    ddmapd::ExecutionConfig cfg;
    cfg.overhead_delta = a.overhead;
    cfg.use_str = a.str;
    cfg.use_ds = a.ds;
    cfg.use_gtr = a.gtr;
    cfg.time_budget_s = a.budget;
    ddmapd::ExecutionResult result;
    if (a.method == "crest")
        result = ddmapd::run_crest(inst, plan, cfg);
    else if (a.method == "baseline")
        result = ddmapd::run_decomp_pp(inst, plan, cfg);
    else {
        std::cerr << "unknown method: " << a.method << '\n';
        return kExitUsage;
    }
    if (!a.out.empty()) ddmapd::save_execution_log(result, inst.map, a.out);
    const ddmapd::ExecValidity validity = ddmapd::validate_execution(result, inst);
    const ddmapd::MetricsReport m = ddmapd::compute_metrics(result, plan, inst.num_agents());
    std::cout << "method " << result.method << " makespan " << m.makespan << " cost " << m.cost
              << " norm_cost " << m.norm_cost << " norm_mksp " << m.norm_makespan
              << " switch_per_shelf " << m.switch_per_shelf << " runtime_s " << m.runtime_s
              << '\n';
    if (!validity.ok()) {
        std::cerr << "execution INVALID:\n" << validity.describe();
        return kExitFail;
    }
    std::cout << "execution valid\n";
    return kExitOk;
}

int cmd_validate(const ValidateArgs& a) {
    const ddmapd::Instance inst = ddmapd::load_instance(a.map, a.scen);
    bool ok = true;
    if (!a.plan.empty()) {
        const ddmapd::ShelfPlan plan = ddmapd::load_plan(a.plan, inst.map);
        const auto validity = ddmapd::validate_shelf_plan(plan, inst);
        std::cout << validity.describe();
        ok = ok && validity.ok();
    }
    if (!a.log.empty()) {
        const ddmapd::ExecutionResult result = ddmapd::load_execution_log(a.log, inst.map);
        const auto validity = ddmapd::validate_execution(result, inst);
        if (validity.ok())
            std::cout << "execution: ok\n";
        else
            std::cout << "execution: VIOLATIONS\n" << validity.describe();
        ok = ok && validity.ok();
    }
    return ok ? kExitOk : kExitFail;
}

int cmd_bench(const BenchArgs& a) {
    const auto suite = ddmapd::load_suite(a.suite);
    const auto rows = ddmapd::run_benchmark(suite, a.jobs, a.budget, &std::cerr);
    std::ofstream out(a.out);
    if (!out) throw ddmapd::ParseError("cannot write CSV: " + a.out);
    ddmapd::write_csv(rows, out);
    std::cout << rows.size() << " rows written to " << a.out << '\n';
    return kExitOk;
}

int cmd_gen(const GenArgs& a) {
    ddmapd::LayoutSpec spec;
    spec.kind = ddmapd::parse_layout_kind(a.kind);
    spec.width = a.width;
    spec.height = a.height;
    spec.density = a.density;
    spec.agents = a.agents;
    spec.seed = a.seed;
    const ddmapd::Instance inst = ddmapd::generate_instance(spec);
    ddmapd::save_map(inst.map, a.out + ".map");
    ddmapd::save_scenario(inst, a.out + ".scen");
    std::cout << "wrote " << a.out << ".map and " << a.out << ".scen (N=" << inst.num_agents()
              << " M=" << inst.num_shelves() << ")\n";
    return kExitOk;
}

int cmd_dump_dep(const DumpArgs& a) {
    const ddmapd::Instance inst = ddmapd::load_instance(a.map, a.scen);
    const ddmapd::ShelfPlan plan = ddmapd::load_plan(a.plan, inst.map);
    const auto validity = ddmapd::validate_shelf_plan(plan, inst);
    if (!validity.ok()) {
        std::cerr << "plan invalid:\n" << validity.describe();
        return kExitFail;
    }
    const auto dep = ddmapd::DependencyGraph::build(plan);
    std::ofstream out(a.out);
    if (!out) throw ddmapd::ParseError("cannot write DOT: " + a.out);
    out << dep.to_dot(inst.map);
    std::cout << "dependency graph written to " << a.out << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DD-MAPD shelf-rearrangement toolkit: seed planning, CREST and baseline "
                 "execution, validation, layout generation, and benchmarking"};
    app.require_subcommand(1);

    PlanArgs plan_args;
    auto* plan = app.add_subcommand("plan", "generate a safe 1-robust shelf plan");
    plan->add_option("--map", plan_args.map)->required();
    plan->add_option("--scen", plan_args.scen)->required();
    plan->add_option("--seed", plan_args.seed);
    plan->add_option("--restarts", plan_args.restarts);
    plan->add_option("--out", plan_args.out)->required();

    ExecArgs exec_args;
    auto* exec = app.add_subcommand("execute", "execute a shelf plan with agents");
    exec->add_option("--map", exec_args.map)->required();
    exec->add_option("--scen", exec_args.scen)->required();
    exec->add_option("--plan", exec_args.plan)->required();
    exec->add_option("--method", exec_args.method)->check(CLI::IsMember({"crest", "baseline"}));
    exec->add_flag("--str", exec_args.str);
    exec->add_flag("--ds", exec_args.ds);
    exec->add_flag("--gtr", exec_args.gtr);
    exec->add_option("--overhead", exec_args.overhead);
    exec->add_option("--budget", exec_args.budget);
    exec->add_option("--out", exec_args.out);

    ValidateArgs val_args;
    auto* val = app.add_subcommand("validate", "validate a plan and/or an execution log");
    val->add_option("--map", val_args.map)->required();
    val->add_option("--scen", val_args.scen)->required();
    val->add_option("--plan", val_args.plan);
    val->add_option("--log", val_args.log);

    BenchArgs bench_args;
    auto* bench = app.add_subcommand("bench", "run a benchmark suite to CSV");
    bench->add_option("--suite", bench_args.suite)->required();
    bench->add_option("--out", bench_args.out)->required();
    bench->add_option("--jobs", bench_args.jobs);
    bench->add_option("--budget", bench_args.budget);

    GenArgs gen_args;
    auto* gen = app.add_subcommand("gen", "generate a layout instance");
    gen->add_option("--kind", gen_args.kind)->check(CLI::IsMember({"r2r", "s2w", "dne"}));
    gen->add_option("--width", gen_args.width);
    gen->add_option("--height", gen_args.height);
    gen->add_option("--density", gen_args.density);
    gen->add_option("--agents", gen_args.agents);
    gen->add_option("--seed", gen_args.seed);
    gen->add_option("--out", gen_args.out)->required();

    DumpArgs dump_args;
    auto* dump = app.add_subcommand("dump-dep", "emit the dependency graph as DOT");
    dump->add_option("--plan", dump_args.plan)->required();
    dump->add_option("--map", dump_args.map)->required();
    dump->add_option("--scen", dump_args.scen)->required();
    dump->add_option("--out", dump_args.out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*plan) return cmd_plan(plan_args);
        if (*exec) return cmd_execute(exec_args);
        if (*val) return cmd_validate(val_args);
        if (*bench) return cmd_bench(bench_args);
        if (*gen) return cmd_gen(gen_args);
        if (*dump) return cmd_dump_dep(dump_args);
    } catch (const ddmapd::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFail;
    }
    return kExitUsage;
}
