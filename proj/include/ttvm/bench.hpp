#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ttvm/engine.hpp"
#include "ttvm/tiers.hpp"

namespace ttvm {

struct BenchCellSpec {
    std::string name;
    std::string program_name;
    Program program;
    int64_t arg = 100;
    Mode mode = Mode::InterpOnly;
    CallKind toplevel = CallKind::Call;
};

struct BenchConfig {
    int stable_iterations = 101; // first iteration discarded
    int startup_runs = 100;      // fresh-session runs
    TierPolicy base_policy;      // thresholds etc.; mode/toplevel set per cell
    // Optional hook that measures one cold run by spawning a process; when
    // absent, startup runs reconstruct a session in-process.
    std::function<double(const BenchCellSpec&)> spawn_runner;
};

struct BenchCell {
    BenchCellSpec spec;
    bool failed = false;
    std::string error;
    std::string result_value;

    double stable_total_ms = 0.0; // sum of iterations 2..N
    double stable_first_ms = 0.0; // discarded warmup iteration
    double startup_total_ms = 0.0;
    double stable_speedup = 0.0;  // vs interp-only, same program+arg
    double startup_speedup = 0.0;

    // Compile footprint of one cold session (what a fresh process compiles).
    uint64_t trace_ops = 0;
    uint64_t guard_count = 0;
    uint64_t segment_count = 0;
    double compile_ms = 0.0;

    // Deterministic counters from the stable session.
    uint64_t decodes = 0;
    uint64_t dispatches = 0;
    uint64_t guard_checks = 0;
    uint64_t transfers = 0;
    uint64_t deopts = 0;
    uint64_t tier_transitions = 0;
    uint64_t steps = 0;
};

struct BenchReport {
    BenchConfig config;
    std::vector<BenchCell> cells;
};

namespace detail {

inline TierPolicy cell_policy(const BenchConfig& cfg, const BenchCellSpec& spec) {
    TierPolicy p = cfg.base_policy;
    p.mode = spec.mode;
    p.toplevel_kind = spec.toplevel;
    return p;
}

} // namespace detail

// Stable protocol: one session, N iterations, first discarded. Startup
// protocol: fresh sessions, one run each (process spawning is simulated by
// session reconstruction unless a spawn hook is given). Compile metrics come
// from one dedicated cold session, matching what a fresh process compiles.
inline BenchCell run_bench_cell(const BenchConfig& cfg, const BenchCellSpec& spec) {
    using clock = std::chrono::steady_clock;
    BenchCell cell;
    cell.spec = spec;
    TierPolicy policy = detail::cell_policy(cfg, spec);

    // Stable speed.
    {
        VmSession session(spec.program, policy);
        for (int i = 0; i < cfg.stable_iterations; ++i) {
            auto t0 = clock::now();
            Outcome o = run_program(session, Value::from_int(spec.arg));
            double ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
            if (o.is_error()) {
                cell.failed = true;
                cell.error = o.error.message();
                return cell;
            }
            cell.result_value = o.value.to_string();
            if (i == 0)
                cell.stable_first_ms = ms;
            else
                cell.stable_total_ms += ms;
        }
        const MetricsSink& m = session.metrics();
        cell.decodes = m.decode_count;
        cell.dispatches = m.dispatch_count;
        cell.guard_checks = m.guard_check_count;
        cell.transfers = m.transfer_count;
        cell.deopts = m.deopt_count;
        cell.tier_transitions = m.tier_transition_count;
        cell.steps = m.steps;
    }

    // Startup speed.
    for (int i = 0; i < cfg.startup_runs; ++i) {
        if (cfg.spawn_runner) {
            cell.startup_total_ms += cfg.spawn_runner(spec);
        } else {
            auto t0 = clock::now();
            VmSession session(spec.program, policy);
            Outcome o = run_program(session, Value::from_int(spec.arg));
            cell.startup_total_ms +=
                std::chrono::duration<double, std::milli>(clock::now() - t0).count();
            if (o.is_error()) {
                cell.failed = true;
                cell.error = o.error.message();
                return cell;
            }
        }
    }

    // Cold-session compile footprint.
    {
        VmSession session(spec.program, policy);
        Outcome o = run_program(session, Value::from_int(spec.arg));
        (void)o;
        const MetricsSink& m = session.metrics();
        cell.trace_ops = m.total_trace_ops();
        cell.guard_count = m.total_guards();
        cell.segment_count = m.total_segments();
        cell.compile_ms = m.total_compile_ms();
    }
    return cell;
}

inline BenchReport run_bench(const BenchConfig& cfg, const std::vector<BenchCellSpec>& specs) {
    BenchReport report;
    report.config = cfg;
    for (const BenchCellSpec& spec : specs) report.cells.push_back(run_bench_cell(cfg, spec));

    // Normalize against the interp-only cell with the same program and arg.
    for (BenchCell& cell : report.cells) {
        if (cell.failed) continue;
        for (const BenchCell& base : report.cells) {
            if (base.failed || base.spec.mode != Mode::InterpOnly) continue;
            if (base.spec.program_name != cell.spec.program_name ||
                base.spec.arg != cell.spec.arg)
                continue;
            if (cell.stable_total_ms > 0)
                cell.stable_speedup = base.stable_total_ms / cell.stable_total_ms;
            if (cell.startup_total_ms > 0)
                cell.startup_speedup = base.startup_total_ms / cell.startup_total_ms;
            break;
        }
    }
    return report;
}

inline nlohmann::ordered_json bench_report_to_json(const BenchReport& report) {
    nlohmann::ordered_json j;
    j["protocol"] = {
        {"stable_iterations", report.config.stable_iterations},
        {"stable_discarded", 1},
        {"startup_runs", report.config.startup_runs},
        {"startup_spawn", static_cast<bool>(report.config.spawn_runner)},
        {"t1_call_threshold", report.config.base_policy.t1_call_threshold},
        {"t2_loop_threshold", report.config.base_policy.t2_loop_threshold},
        {"bridge_threshold", report.config.base_policy.bridge_threshold},
    };
    nlohmann::ordered_json cells = nlohmann::ordered_json::array();
    for (const BenchCell& c : report.cells) {
        nlohmann::ordered_json cj;
        cj["name"] = c.spec.name;
        cj["program"] = c.spec.program_name;
        cj["mode"] = mode_name(c.spec.mode);
        cj["arg"] = c.spec.arg;
        cj["failed"] = c.failed;
        if (c.failed) {
            cj["error"] = c.error;
        } else {
            cj["result"] = c.result_value;
            cj["stable_ms"] = c.stable_total_ms;
            cj["stable_first_ms"] = c.stable_first_ms;
            cj["startup_ms"] = c.startup_total_ms;
            cj["stable_speedup"] = c.stable_speedup;
            cj["startup_speedup"] = c.startup_speedup;
            cj["compile"] = {{"trace_ops", c.trace_ops},
                             {"guards", c.guard_count},
                             {"segments", c.segment_count},
                             {"compile_ms", c.compile_ms}};
            cj["counters"] = {{"decodes", c.decodes},
                              {"dispatches", c.dispatches},
                              {"guard_checks", c.guard_checks},
                              {"transfers", c.transfers},
                              {"deopts", c.deopts},
                              {"tier_transitions", c.tier_transitions},
                              {"steps", c.steps}};
        }
        cells.push_back(cj);
    }
    j["cells"] = cells;
    return j;
}

// Fixed column order; keep in sync with docs/FORMATS.md.
inline std::string bench_report_to_csv(const BenchReport& report) {
    std::string out =
        "name,program,mode,arg,result,stable_ms,startup_ms,stable_speedup,startup_speedup,"
        "trace_ops,guards,segments,compile_ms,decodes,dispatches,guard_checks,transfers,"
        "deopts,tier_transitions,steps,error\n";
    for (const BenchCell& c : report.cells) {
        out += c.spec.name + "," + c.spec.program_name + "," + mode_name(c.spec.mode) + "," +
               std::to_string(c.spec.arg) + "," + c.result_value + "," +
               std::to_string(c.stable_total_ms) + "," + std::to_string(c.startup_total_ms) +
               "," + std::to_string(c.stable_speedup) + "," + std::to_string(c.startup_speedup) +
               "," + std::to_string(c.trace_ops) + "," + std::to_string(c.guard_count) + "," +
               std::to_string(c.segment_count) + "," + std::to_string(c.compile_ms) + "," +
               std::to_string(c.decodes) + "," + std::to_string(c.dispatches) + "," +
               std::to_string(c.guard_checks) + "," + std::to_string(c.transfers) + "," +
               std::to_string(c.deopts) + "," + std::to_string(c.tier_transitions) + "," +
               std::to_string(c.steps) + "," + c.error + "\n";
    }
    return out;
}

} // namespace ttvm
