#pragma once

#include <optional>
#include <set>
#include <string>

#include "ttvm/bytecode.hpp"
#include "ttvm/trace.hpp"
#include "ttvm/traverse_stack.hpp"

namespace ttvm {

enum class TraceAbort {
    None,
    TooLong,
    LeftLoop,
    CallDepth,
};

inline const char* trace_abort_name(TraceAbort a) {
    switch (a) {
    case TraceAbort::None: return "none";
    case TraceAbort::TooLong: return "trace-too-long";
    case TraceAbort::LeftLoop: return "left-loop";
    case TraceAbort::CallDepth: return "call-depth";
    }
    return "?";
}

struct TraceMethodResult {
    std::optional<LinearTrace> trace;
    TraceAbort abort = TraceAbort::None;
    bool ok() const { return trace.has_value(); }
};

// Method traversal: linearize a whole method into one trace by walking every
// path once. Branches record a marked guard for the followed arm and push the
// other arm on the traverse stack; jumps to already-visited code and returns
// become emit pseudo ops, after which traversal resumes from the traverse
// stack. Values are never computed; the walk is abstract, so both arms
// of every branch get covered. Calls are recorded as plain handler calls and
// dispatched at run time; callees are not entered.
inline TraceMethodResult trace_method(const Program& program, uint32_t entry,
                                      TraverseInterner& interner, size_t op_cap = 4096) {
    LinearTrace trace;
    trace.kind = LinearTrace::Kind::Tier1Method;
    trace.entry_pc = entry;
    trace.inputargs.stack_depth = 1;

    std::set<uint32_t> visited;
    const TraverseStack* pending = nullptr;
    uint32_t pc = entry;
    bool done = false;

    // Returns false when the traverse stack is exhausted.
    auto pop_or_finish = [&]() {
        if (t_is_empty(pending)) return false;
        auto [next_pc, rest] = t_pop(pending);
        pending = rest;
        pc = next_pc;
        return true;
    };

    while (!done) {
        if (trace.ops.size() > op_cap) return {std::nullopt, TraceAbort::TooLong};

        if (visited.count(pc)) {
            // Reached by fall-through or a traverse-stack pop: cut here and
            // jump to the code recorded earlier.
            trace.ops.push_back(TraceOp::emit_jump(-1, pc));
            if (!pop_or_finish()) done = true;
            continue;
        }
        auto ins = program.decode_at(pc);
        if (!ins) return {std::nullopt, TraceAbort::LeftLoop}; // invalid programs never get here
        visited.insert(pc);

        switch (ins->opcode) {
        case Opcode::JumpIf: {
            uint32_t target = static_cast<uint32_t>(ins->operand);
            GuardFailure g;
            g.guard_id = static_cast<uint32_t>(trace.guards.size());
            g.origin_pc = pc;
            g.resume_pc = target;
            g.expected = false; // follow the fall-through arm
            g.marked = true;
            trace.ops.push_back(TraceOp::guard(pc, g.guard_id));
            trace.guards.push_back(g);
            pending = t_push(target, pending, interner);
            pc = ins->next_pc();
            break;
        }
        case Opcode::Jump: {
            uint32_t target = static_cast<uint32_t>(ins->operand);
            if (visited.count(target)) {
                trace.ops.push_back(TraceOp::emit_jump(static_cast<int32_t>(pc), target));
                if (!pop_or_finish()) done = true;
            } else {
                // Jump into fresh code: performs as defined, recorded as a
                // handler call so the trace covers this pc.
                trace.ops.push_back(TraceOp::call_handler(pc, Opcode::Jump, ins->operand));
                pc = target;
            }
            break;
        }
        case Opcode::Ret:
        case Opcode::Exit: {
            bool is_exit = ins->opcode == Opcode::Exit;
            uint8_t count = is_exit ? 1 : static_cast<uint8_t>(ins->operand);
            trace.ops.push_back(TraceOp::emit_ret(pc, count, is_exit));
            if (!pop_or_finish()) done = true;
            break;
        }
        default:
            trace.ops.push_back(TraceOp::call_handler(pc, ins->opcode, ins->operand));
            pc = ins->next_pc();
            break;
        }
    }

    return {std::move(trace), TraceAbort::None};
}

} // namespace ttvm
