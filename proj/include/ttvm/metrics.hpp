#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ttvm {

struct CompileRecord {
    uint32_t pc = 0;
    int tier = 1; // 1 = method, 2 = loop or bridge
    std::string kind; // "method" | "loop" | "bridge"
    size_t op_count = 0;
    size_t guard_count = 0;
    size_t segment_count = 0;
    double wall_ms = 0.0;
    bool aborted = false;
    std::string abort_reason;
};

// Per-session counters. Counts are deterministic for a fixed program, input,
// and policy; only the wall times vary between runs.
struct MetricsSink {
    uint64_t decode_count = 0;      // bytecode fetch+decode steps (interpreter)
    uint64_t dispatch_count = 0;    // handler invocations (interpreter + compiled)
    uint64_t guard_check_count = 0; // guard evaluations in compiled code
    uint64_t transfer_count = 0;    // segment/loop terminator transfers
    uint64_t deopt_count = 0;       // compiled -> interpreter handoffs
    uint64_t tier_transition_count = 0; // entries into compiled code + deopts
    uint64_t steps = 0;             // executed bytecode-level instructions, all modes

    std::vector<CompileRecord> compiles;

    uint64_t total_dispatch_events() const {
        return decode_count + dispatch_count + guard_check_count + transfer_count;
    }
    uint64_t total_trace_ops() const {
        uint64_t n = 0;
        for (const auto& c : compiles)
            if (!c.aborted) n += c.op_count;
        return n;
    }
    uint64_t total_guards() const {
        uint64_t n = 0;
        for (const auto& c : compiles)
            if (!c.aborted) n += c.guard_count;
        return n;
    }
    uint64_t total_segments() const {
        uint64_t n = 0;
        for (const auto& c : compiles)
            if (!c.aborted) n += c.segment_count;
        return n;
    }
    double total_compile_ms() const {
        double n = 0;
        for (const auto& c : compiles) n += c.wall_ms;
        return n;
    }
};

} // namespace ttvm
