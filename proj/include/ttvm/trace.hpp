#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ttvm/bytecode.hpp"

namespace ttvm {

// Descriptor of a guard's exit: where to resume when it fails, which
// truthiness it asserts, and (once resolved) the bridge that continues it.
struct GuardFailure {
    uint32_t guard_id = 0;  // index within the owning trace/compiled unit
    uint32_t origin_pc = 0; // the branching instruction
    uint32_t resume_pc = 0; // the arm the trace did not follow
    bool expected = false;  // condition value under which the guard holds
    bool marked = false;    // branch guard from method traversal
    uint64_t failure_count = 0;
    int bridge = -1;              // bridge index once attached; never reassigned
    bool bridge_attempted = false;
};

// One recorded operation. Traces are linear: handler calls, guards, and the
// pseudo ops that mark cut points (EmitJump/EmitRet) or, after stitching,
// segment terminators (JumpOp/RetOp).
struct TraceOp {
    enum class Kind : uint8_t { CallHandler, Guard, EmitJump, EmitRet, JumpOp, RetOp };

    Kind kind = Kind::CallHandler;
    int32_t origin_pc = -1; // -1: synthetic (no underlying instruction)

    // CallHandler
    Opcode opcode = Opcode::Exit;
    int operand = -1;

    // Guard
    uint32_t guard_index = 0;

    // EmitJump / JumpOp
    uint32_t target_pc = 0;
    int token = -1;

    // EmitRet / RetOp
    uint8_t ret_count = 1;
    bool is_exit = false;

    bool synthetic() const { return origin_pc < 0; }

    static TraceOp call_handler(uint32_t pc, Opcode op, int operand) {
        TraceOp t;
        t.kind = Kind::CallHandler;
        t.origin_pc = static_cast<int32_t>(pc);
        t.opcode = op;
        t.operand = operand;
        return t;
    }
    static TraceOp guard(uint32_t pc, uint32_t guard_index) {
        TraceOp t;
        t.kind = Kind::Guard;
        t.origin_pc = static_cast<int32_t>(pc);
        t.guard_index = guard_index;
        return t;
    }
    static TraceOp emit_jump(int32_t origin_pc, uint32_t target_pc) {
        TraceOp t;
        t.kind = Kind::EmitJump;
        t.origin_pc = origin_pc;
        t.target_pc = target_pc;
        return t;
    }
    static TraceOp emit_ret(uint32_t pc, uint8_t ret_count, bool is_exit) {
        TraceOp t;
        t.kind = Kind::EmitRet;
        t.origin_pc = static_cast<int32_t>(pc);
        t.ret_count = ret_count;
        t.is_exit = is_exit;
        return t;
    }
    static TraceOp jump_op(int32_t origin_pc, int token, uint32_t target_pc) {
        TraceOp t;
        t.kind = Kind::JumpOp;
        t.origin_pc = origin_pc;
        t.token = token;
        t.target_pc = target_pc;
        return t;
    }
    static TraceOp ret_op(int32_t origin_pc, uint8_t ret_count, bool is_exit) {
        TraceOp t;
        t.kind = Kind::RetOp;
        t.origin_pc = origin_pc;
        t.ret_count = ret_count;
        t.is_exit = is_exit;
        return t;
    }
};

inline const char* trace_op_kind_name(TraceOp::Kind k) {
    switch (k) {
    case TraceOp::Kind::CallHandler: return "call_handler";
    case TraceOp::Kind::Guard: return "guard";
    case TraceOp::Kind::EmitJump: return "emit_jump";
    case TraceOp::Kind::EmitRet: return "emit_ret";
    case TraceOp::Kind::JumpOp: return "jump";
    case TraceOp::Kind::RetOp: return "ret";
    }
    return "?";
}

// Frame-state descriptor at trace entry; enough to check that a frame is
// shape-compatible before running compiled code.
struct InputArgs {
    uint32_t stack_depth = 0;
};

struct LinearTrace {
    enum class Kind : uint8_t { Tier1Method, Tier2Loop, Tier2Bridge };

    Kind kind = Kind::Tier1Method;
    uint32_t entry_pc = 0;
    InputArgs inputargs;
    std::vector<TraceOp> ops;
    std::vector<GuardFailure> guards; // referenced by TraceOp::guard_index

    size_t marked_guard_count() const {
        size_t n = 0;
        for (const auto& g : guards)
            if (g.marked) ++n;
        return n;
    }
};

inline const char* trace_kind_name(LinearTrace::Kind k) {
    switch (k) {
    case LinearTrace::Kind::Tier1Method: return "method";
    case LinearTrace::Kind::Tier2Loop: return "loop";
    case LinearTrace::Kind::Tier2Bridge: return "bridge";
    }
    return "?";
}

} // namespace ttvm
