#pragma once

#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ttvm/bytecode.hpp"
#include "ttvm/metrics.hpp"
#include "ttvm/stitcher.hpp"
#include "ttvm/trace.hpp"
#include "ttvm/traverse_stack.hpp"

namespace ttvm {

enum class Mode { InterpOnly, T1Only, T2Only, Annotated, Auto };

inline const char* mode_name(Mode m) {
    switch (m) {
    case Mode::InterpOnly: return "interp";
    case Mode::T1Only: return "t1";
    case Mode::T2Only: return "t2";
    case Mode::Annotated: return "annotated";
    case Mode::Auto: return "auto";
    }
    return "?";
}

inline std::optional<Mode> mode_from_name(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (s == "interp" || s == "interp-only") return Mode::InterpOnly;
    if (s == "t1" || s == "t1-only") return Mode::T1Only;
    if (s == "t2" || s == "t2-only") return Mode::T2Only;
    if (s == "annotated") return Mode::Annotated;
    if (s == "auto") return Mode::Auto;
    return std::nullopt;
}

enum class CallKind { Call, CallNormal, CallJit };

inline CallKind call_kind_of(Opcode op) {
    switch (op) {
    case Opcode::CallNormal: return CallKind::CallNormal;
    case Opcode::CallJit: return CallKind::CallJit;
    default: return CallKind::Call;
    }
}

inline std::optional<CallKind> call_kind_from_name(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (s == "call") return CallKind::Call;
    if (s == "call_normal" || s == "normal") return CallKind::CallNormal;
    if (s == "call_jit" || s == "jit") return CallKind::CallJit;
    return std::nullopt;
}

struct TierPolicy {
    uint64_t t1_call_threshold = 2;   // method-entry hotness
    uint64_t t2_loop_threshold = 100; // back-edge hotness
    uint64_t bridge_threshold = 16;   // guard failures before a bridge is traced
    Mode mode = Mode::Annotated;
    CallKind toplevel_kind = CallKind::Call; // regime of the top-level method in annotated mode
    uint64_t fuel = 100'000'000;      // executed-instruction budget per run
    size_t trace_op_cap = 4096;
    int record_call_depth = 8;        // callee nesting allowed while recording
    int max_call_depth = 512;
    bool keep_traces = false;         // retain linear traces for dumps

    void check() const {
        if (t1_call_threshold < 1 || t2_loop_threshold < 1 || bridge_threshold < 1)
            throw std::invalid_argument("tier thresholds must be >= 1");
    }
};

// Tier-2 compiled unit: a loop trace plus bridges attached to its guards.
struct LoopCode {
    uint32_t header_pc = 0;
    LinearTrace trace;                 // ends with JumpOp back to the header
    std::vector<LinearTrace> bridges;  // indexed by GuardFailure::bridge

    size_t op_count() const {
        size_t n = trace.ops.size();
        for (const auto& b : bridges) n += b.ops.size();
        return n;
    }
};

struct StoredTrace {
    uint32_t pc = 0;
    std::string kind; // "method" | "loop" | "bridge"
    LinearTrace trace;
};

// One session = one program, one policy, one thread. Holds the code cache,
// hotness profiles, the traverse-stack interner, and all counters.
class VmSession {
public:
    VmSession(Program program, TierPolicy policy = {})
        : program_(std::move(program)), policy_(policy) {
        policy_.check();
        merge_points_ = program_.backward_jump_targets();
        merge_bitmap_.assign(program_.size() + 1, false);
        for (uint32_t pc : merge_points_)
            if (pc < merge_bitmap_.size()) merge_bitmap_[pc] = true;
    }

    const Program& program() const { return program_; }
    const TierPolicy& policy() const { return policy_; }
    TierPolicy& policy() { return policy_; }
    MetricsSink& metrics() { return metrics_; }
    const MetricsSink& metrics() const { return metrics_; }
    TraverseInterner& interner() { return interner_; }

    bool is_merge_point(uint32_t pc) const {
        return pc < merge_bitmap_.size() && merge_bitmap_[pc];
    }

    // Code cache.
    const StitchedCode* method_code(uint32_t pc) const {
        auto it = method_cache_.find(pc);
        return it == method_cache_.end() ? nullptr : it->second.get();
    }
    StitchedCode* method_code(uint32_t pc) {
        auto it = method_cache_.find(pc);
        return it == method_cache_.end() ? nullptr : it->second.get();
    }
    void cache_method(uint32_t pc, StitchedCode code) {
        method_cache_[pc] = std::make_unique<StitchedCode>(std::move(code));
    }
    LoopCode* loop_code(uint32_t pc) {
        auto it = loop_cache_.find(pc);
        return it == loop_cache_.end() ? nullptr : it->second.get();
    }
    void cache_loop(uint32_t pc, LoopCode code) {
        loop_cache_[pc] = std::make_unique<LoopCode>(std::move(code));
    }
    const std::map<uint32_t, std::unique_ptr<StitchedCode>>& method_cache() const {
        return method_cache_;
    }
    const std::map<uint32_t, std::unique_ptr<LoopCode>>& loop_cache() const {
        return loop_cache_;
    }

    // Hotness profiling. Returns true when the threshold is crossed exactly.
    bool record_hot_entry(uint32_t pc) {
        return ++entry_hotness_[pc] == policy_.t1_call_threshold;
    }
    bool record_hot_edge(uint32_t pc) {
        return ++edge_hotness_[pc] == policy_.t2_loop_threshold;
    }
    uint64_t entry_hotness(uint32_t pc) const {
        auto it = entry_hotness_.find(pc);
        return it == entry_hotness_.end() ? 0 : it->second;
    }
    uint64_t edge_hotness(uint32_t pc) const {
        auto it = edge_hotness_.find(pc);
        return it == edge_hotness_.end() ? 0 : it->second;
    }

    void blacklist_t1(uint32_t pc) { t1_blacklist_.insert(pc); }
    void blacklist_t2(uint32_t pc) { t2_blacklist_.insert(pc); }
    bool t1_blacklisted(uint32_t pc) const { return t1_blacklist_.count(pc) > 0; }
    bool t2_blacklisted(uint32_t pc) const { return t2_blacklist_.count(pc) > 0; }

    // Per-run fuel.
    void reset_fuel() { fuel_left_ = policy_.fuel; }
    bool charge() {
        ++metrics_.steps;
        if (fuel_left_ == 0) return false;
        --fuel_left_;
        return true;
    }

    void store_trace(uint32_t pc, std::string kind, const LinearTrace& trace) {
        if (policy_.keep_traces) stored_traces_.push_back({pc, std::move(kind), trace});
    }
    const std::vector<StoredTrace>& stored_traces() const { return stored_traces_; }

private:
    Program program_;
    TierPolicy policy_;
    MetricsSink metrics_;
    TraverseInterner interner_;
    std::set<uint32_t> merge_points_;
    std::vector<bool> merge_bitmap_;
    std::map<uint32_t, std::unique_ptr<StitchedCode>> method_cache_;
    std::map<uint32_t, std::unique_ptr<LoopCode>> loop_cache_;
    std::map<uint32_t, uint64_t> entry_hotness_;
    std::map<uint32_t, uint64_t> edge_hotness_;
    std::set<uint32_t> t1_blacklist_;
    std::set<uint32_t> t2_blacklist_;
    uint64_t fuel_left_ = 0;
    std::vector<StoredTrace> stored_traces_;
};

// Attach a tier-2 bridge to a failed guard. The bridge must start at the
// guard's resume pc and a guard's bridge is never reassigned.
inline void attach_bridge(LoopCode& code, uint32_t guard_index, LinearTrace bridge) {
    GuardFailure& g = code.trace.guards.at(guard_index);
    if (g.bridge >= 0) throw std::logic_error("bridge already attached to guard");
    if (bridge.entry_pc != g.resume_pc)
        throw std::logic_error("bridge entry pc " + std::to_string(bridge.entry_pc) +
                               " != guard resume pc " + std::to_string(g.resume_pc));
    if (bridge.ops.empty() || (bridge.ops.back().kind != TraceOp::Kind::JumpOp &&
                               bridge.ops.back().kind != TraceOp::Kind::RetOp))
        throw std::logic_error("bridge trace lacks a terminator");
    // No trace-tree growth past one level: bridge guards always deopt.
    for (auto& bg : bridge.guards) bg.bridge_attempted = true;
    g.bridge = static_cast<int>(code.bridges.size());
    g.bridge_attempted = true;
    code.bridges.push_back(std::move(bridge));
}

} // namespace ttvm
