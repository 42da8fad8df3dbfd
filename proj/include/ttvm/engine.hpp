#pragma once

#include <chrono>
#include <optional>

#include "ttvm/interpreter.hpp"
#include "ttvm/stitcher.hpp"
#include "ttvm/tiers.hpp"
#include "ttvm/tracer.hpp"

namespace ttvm {

// Which compilation machinery is active for one method activation.
struct Regime {
    bool t1 = false;
    bool t2 = false;
};

inline Regime regime_for(Mode mode, CallKind kind) {
    switch (mode) {
    case Mode::InterpOnly: return {false, false};
    case Mode::T1Only: return {true, false};
    case Mode::T2Only: return {false, true};
    case Mode::Auto: return {true, true};
    case Mode::Annotated:
        switch (kind) {
        case CallKind::Call: return {true, false};
        case CallKind::CallNormal: return {false, false};
        case CallKind::CallJit: return {false, true};
        }
    }
    return {false, false};
}

inline Outcome run_frame(VmSession& s, Frame& frame, Regime regime, int depth,
                         uint32_t method_entry);
inline Outcome execute_stitched(VmSession& s, StitchedCode& code, Frame& frame, int depth);
inline Outcome execute_loop(VmSession& s, LoopCode& code, Frame& frame, int depth);

namespace detail {

inline double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

} // namespace detail

// Tier-1 compilation: method traversal, then stitching. Aborts blacklist the
// entry so later triggers are no-ops.
inline void compile_method(VmSession& s, uint32_t entry) {
    auto t0 = std::chrono::steady_clock::now();
    TraceMethodResult r =
        trace_method(s.program(), entry, s.interner(), s.policy().trace_op_cap);
    CompileRecord rec;
    rec.pc = entry;
    rec.tier = 1;
    rec.kind = "method";
    if (!r.ok()) {
        s.blacklist_t1(entry);
        rec.aborted = true;
        rec.abort_reason = trace_abort_name(r.abort);
        rec.wall_ms = detail::ms_since(t0);
        s.metrics().compiles.push_back(rec);
        return;
    }
    s.store_trace(entry, "method", *r.trace);
    StitchedCode code = stitch_trace(*r.trace);
    rec.op_count = r.trace->ops.size();
    rec.guard_count = r.trace->guards.size();
    rec.segment_count = code.segments.size();
    rec.wall_ms = detail::ms_since(t0);
    s.metrics().compiles.push_back(rec);
    s.cache_method(entry, std::move(code));
}

// Compile a method immediately, bypassing hotness. Returns null on abort.
inline const StitchedCode* compile_method_now(VmSession& s, uint32_t entry) {
    if (!s.method_code(entry) && !s.t1_blacklisted(entry)) compile_method(s, entry);
    return s.method_code(entry);
}

inline Outcome dispatch_call(VmSession& s, uint32_t callee_pc, CallKind kind, Value arg,
                             int depth) {
    if (depth > s.policy().max_call_depth)
        return Outcome::fail(ErrorKind::CallDepthExceeded, callee_pc);
    Frame callee;
    callee.stack.push_back(arg);
    callee.pc = callee_pc;
    callee.program = &s.program();
    Regime regime = regime_for(s.policy().mode, kind);
    return run_frame(s, callee, regime, depth, callee_pc);
}

namespace detail {

enum class RecordStatus { Closed, Ended, Aborted };

struct RecordResult {
    RecordStatus status = RecordStatus::Aborted;
    TraceAbort abort = TraceAbort::None;
    Outcome outcome; // valid when status == Ended
};

// Concrete-path recorder shared by loop tracing and bridge tracing: executes
// the frame's instructions through the normal handlers while appending trace
// ops. Recording is frame-scoped; callees run unrecorded behind their call.
// Stops when the path returns to `stop_header` (Closed), or when the frame
// finishes (bridge mode records a RetOp and Ends; loop mode aborts instead,
// leaving the terminating instruction unexecuted for the interpreter).
inline RecordResult record_path(VmSession& s, Frame& f, int depth, uint32_t stop_header,
                                bool bridge_mode, LinearTrace& trace) {
    const Program& prog = s.program();
    for (;;) {
        if (f.pc == stop_header && !trace.ops.empty()) {
            trace.ops.push_back(TraceOp::jump_op(-1, -1, stop_header));
            return {RecordStatus::Closed, TraceAbort::None, {}};
        }
        if (trace.ops.size() >= s.policy().trace_op_cap)
            return {RecordStatus::Aborted, TraceAbort::TooLong, {}};

        auto ins = prog.decode_at(f.pc);
        if (!ins)
            return {RecordStatus::Ended, TraceAbort::None,
                    Outcome::fail(ErrorKind::InvalidInstruction, f.pc)};
        uint32_t pc = f.pc;
        switch (ins->opcode) {
        case Opcode::Ret:
        case Opcode::Exit: {
            if (!bridge_mode) return {RecordStatus::Aborted, TraceAbort::LeftLoop, {}};
            s.metrics().decode_count++;
            if (!s.charge())
                return {RecordStatus::Ended, TraceAbort::None,
                        Outcome::fail(ErrorKind::FuelExhausted, pc)};
            s.metrics().dispatch_count++;
            bool is_exit = ins->opcode == Opcode::Exit;
            uint8_t count = is_exit ? 1 : static_cast<uint8_t>(ins->operand);
            if (f.stack.size() < count)
                return {RecordStatus::Ended, TraceAbort::None,
                        Outcome::fail(ErrorKind::StackUnderflow, pc, mnemonic(ins->opcode))};
            trace.ops.push_back(TraceOp::ret_op(static_cast<int32_t>(pc), count, is_exit));
            if (is_exit)
                return {RecordStatus::Ended, TraceAbort::None, Outcome::done(f.pop())};
            if (depth == 0)
                return {RecordStatus::Ended, TraceAbort::None,
                        Outcome::fail(ErrorKind::RetAtTopLevel, pc)};
            std::vector<Value> vals(f.stack.end() - count, f.stack.end());
            return {RecordStatus::Ended, TraceAbort::None, Outcome::returned(std::move(vals))};
        }
        case Opcode::Call:
        case Opcode::CallNormal:
        case Opcode::CallJit: {
            if (s.policy().record_call_depth < 1)
                return {RecordStatus::Aborted, TraceAbort::CallDepth, {}};
            s.metrics().decode_count++;
            if (!s.charge())
                return {RecordStatus::Ended, TraceAbort::None,
                        Outcome::fail(ErrorKind::FuelExhausted, pc)};
            s.metrics().dispatch_count++;
            if (f.stack.empty())
                return {RecordStatus::Ended, TraceAbort::None,
                        Outcome::fail(ErrorKind::StackUnderflow, pc, "CALL argument")};
            trace.ops.push_back(TraceOp::call_handler(pc, ins->opcode, ins->operand));
            Value arg = f.pop();
            Outcome r = dispatch_call(s, static_cast<uint32_t>(ins->operand),
                                      call_kind_of(ins->opcode), arg, depth + 1);
            if (r.kind != Outcome::Kind::Returned)
                return {RecordStatus::Ended, TraceAbort::None, std::move(r)};
            for (const Value& v : r.ret_values) f.push(v);
            f.pc = ins->next_pc();
            break;
        }
        case Opcode::JumpIf: {
            s.metrics().decode_count++;
            if (!s.charge())
                return {RecordStatus::Ended, TraceAbort::None,
                        Outcome::fail(ErrorKind::FuelExhausted, pc)};
            s.metrics().dispatch_count++;
            if (f.stack.empty())
                return {RecordStatus::Ended, TraceAbort::None,
                        Outcome::fail(ErrorKind::StackUnderflow, pc, "JUMP_IF")};
            Value cond = f.pop();
            bool observed = truthy(cond);
            uint32_t target = static_cast<uint32_t>(ins->operand);
            GuardFailure g;
            g.guard_id = static_cast<uint32_t>(trace.guards.size());
            g.origin_pc = pc;
            g.expected = observed;
            g.resume_pc = observed ? ins->next_pc() : target;
            g.marked = false;
            trace.ops.push_back(TraceOp::guard(pc, g.guard_id));
            trace.guards.push_back(g);
            f.pc = observed ? target : ins->next_pc();
            break;
        }
        case Opcode::Jump: {
            s.metrics().decode_count++;
            if (!s.charge())
                return {RecordStatus::Ended, TraceAbort::None,
                        Outcome::fail(ErrorKind::FuelExhausted, pc)};
            s.metrics().dispatch_count++;
            uint32_t target = static_cast<uint32_t>(ins->operand);
            f.pc = target;
            if (target == stop_header) {
                trace.ops.push_back(
                    TraceOp::jump_op(static_cast<int32_t>(pc), -1, stop_header));
                return {RecordStatus::Closed, TraceAbort::None, {}};
            }
            trace.ops.push_back(TraceOp::call_handler(pc, Opcode::Jump, ins->operand));
            break;
        }
        default: {
            s.metrics().decode_count++;
            if (!s.charge())
                return {RecordStatus::Ended, TraceAbort::None,
                        Outcome::fail(ErrorKind::FuelExhausted, pc)};
            s.metrics().dispatch_count++;
            trace.ops.push_back(TraceOp::call_handler(pc, ins->opcode, ins->operand));
            if (auto err = exec_handler(*ins, f))
                return {RecordStatus::Ended, TraceAbort::None,
                        Outcome::fail(err->kind, err->pc, err->detail)};
            break;
        }
        }
    }
}

} // namespace detail

// Tier-2 loop tracing at a hot header: records the concretely executed path
// while the frame runs, closing when execution returns to the header. The
// frame makes real progress either way; on abort the header is blacklisted
// and the interpreter picks up where recording stopped.
struct TraceLoopResult {
    bool compiled = false;
    TraceAbort abort = TraceAbort::None;
    std::optional<Outcome> outcome; // set when the program finished while recording
};

inline TraceLoopResult trace_loop(VmSession& s, Frame& f, int depth) {
    uint32_t header = f.pc;
    auto t0 = std::chrono::steady_clock::now();
    LinearTrace trace;
    trace.kind = LinearTrace::Kind::Tier2Loop;
    trace.entry_pc = header;
    trace.inputargs.stack_depth = f.depth();

    detail::RecordResult r = detail::record_path(s, f, depth, header, false, trace);

    CompileRecord rec;
    rec.pc = header;
    rec.tier = 2;
    rec.kind = "loop";
    rec.wall_ms = detail::ms_since(t0);
    if (r.status == detail::RecordStatus::Closed) {
        rec.op_count = trace.ops.size();
        rec.guard_count = trace.guards.size();
        rec.segment_count = 1;
        s.metrics().compiles.push_back(rec);
        s.store_trace(header, "loop", trace);
        LoopCode code;
        code.header_pc = header;
        code.trace = std::move(trace);
        s.cache_loop(header, std::move(code));
        return {true, TraceAbort::None, std::nullopt};
    }
    rec.aborted = true;
    rec.abort_reason = r.status == detail::RecordStatus::Ended ? trace_abort_name(TraceAbort::LeftLoop)
                                                               : trace_abort_name(r.abort);
    s.metrics().compiles.push_back(rec);
    s.blacklist_t2(header);
    if (r.status == detail::RecordStatus::Ended)
        return {false, TraceAbort::LeftLoop, std::move(r.outcome)};
    return {false, r.abort, std::nullopt};
}

struct ResolveResult {
    bool resolved = false;
    int segment = 0;
    int offset = 0;
    uint32_t pc = 0; // deopt target when unresolved
};

// Run-time counterpart of a target token: find where its pc was recorded.
// Unindexed pcs deoptimize rather than fail.
inline ResolveResult resolve_jump_target(const StitchedCode& code, int token_id) {
    const TargetToken& token = code.token_map.token(token_id);
    if (token.is_return()) return {false, 0, 0, 0};
    uint32_t pc = static_cast<uint32_t>(token.pc);
    auto it = code.pc_index.find(pc);
    if (it == code.pc_index.end()) return {false, 0, 0, pc};
    return {true, it->second.first, it->second.second, pc};
}

// Threaded execution of stitched tier-1 code: calls the interpreter's own
// handlers per recorded op, checks guards on the live frame, and transfers to
// linked bridges on failure. Guards without a bridge deoptimize.
inline Outcome execute_stitched(VmSession& s, StitchedCode& code, Frame& f, int depth) {
    s.metrics().tier_transition_count++;
    f.pc = code.entry_pc;
    int seg = 0;
    size_t idx = 0;
    for (;;) {
        const Segment& segment = code.segments[static_cast<size_t>(seg)];
        const TraceOp& op = segment.ops[idx];
        switch (op.kind) {
        case TraceOp::Kind::CallHandler: {
            uint32_t pc = static_cast<uint32_t>(op.origin_pc);
            if (!s.charge()) return Outcome::fail(ErrorKind::FuelExhausted, pc);
            s.metrics().dispatch_count++;
            if (is_call_opcode(op.opcode)) {
                if (f.stack.empty())
                    return Outcome::fail(ErrorKind::StackUnderflow, pc, "CALL argument");
                Value arg = f.pop();
                Outcome r = dispatch_call(s, static_cast<uint32_t>(op.operand),
                                          call_kind_of(op.opcode), arg, depth + 1);
                if (r.kind != Outcome::Kind::Returned) return r;
                for (const Value& v : r.ret_values) f.push(v);
                f.pc = pc + 2;
            } else {
                Instruction ins{pc, op.opcode, op.operand};
                if (auto err = exec_handler(ins, f))
                    return Outcome::fail(err->kind, err->pc, err->detail);
            }
            ++idx;
            break;
        }
        case TraceOp::Kind::Guard: {
            uint32_t pc = static_cast<uint32_t>(op.origin_pc);
            if (!s.charge()) return Outcome::fail(ErrorKind::FuelExhausted, pc);
            s.metrics().guard_check_count++;
            GuardFailure& g = code.guards[op.guard_index];
            if (f.stack.empty())
                return Outcome::fail(ErrorKind::StackUnderflow, pc, "guard condition");
            Value cond = f.pop();
            if (truthy(cond) == g.expected) {
                ++idx;
                break;
            }
            auto it = code.links.find(g.guard_id);
            if (it != code.links.end()) {
                seg = it->second;
                idx = 0;
                f.pc = g.resume_pc;
            } else {
                g.failure_count++;
                s.metrics().deopt_count++;
                s.metrics().tier_transition_count++;
                f.pc = g.resume_pc;
                return Outcome::deopt(g.resume_pc);
            }
            break;
        }
        case TraceOp::Kind::JumpOp: {
            if (!op.synthetic()) {
                if (!s.charge())
                    return Outcome::fail(ErrorKind::FuelExhausted,
                                         static_cast<uint32_t>(op.origin_pc));
            }
            s.metrics().transfer_count++;
            ResolveResult r = resolve_jump_target(code, op.token);
            if (!r.resolved) {
                s.metrics().deopt_count++;
                s.metrics().tier_transition_count++;
                f.pc = r.pc;
                return Outcome::deopt(r.pc);
            }
            seg = r.segment;
            idx = static_cast<size_t>(r.offset);
            f.pc = r.pc;
            break;
        }
        case TraceOp::Kind::RetOp: {
            uint32_t pc = static_cast<uint32_t>(op.origin_pc);
            if (!s.charge()) return Outcome::fail(ErrorKind::FuelExhausted, pc);
            s.metrics().transfer_count++;
            if (op.is_exit) {
                if (f.stack.empty()) return Outcome::fail(ErrorKind::StackUnderflow, pc, "EXIT");
                return Outcome::done(f.pop());
            }
            if (depth == 0) return Outcome::fail(ErrorKind::RetAtTopLevel, pc);
            if (f.stack.size() < op.ret_count)
                return Outcome::fail(ErrorKind::StackUnderflow, pc, "RET");
            std::vector<Value> vals(f.stack.end() - op.ret_count, f.stack.end());
            return Outcome::returned(std::move(vals));
        }
        default:
            return Outcome::fail(ErrorKind::InvalidInstruction,
                                 op.origin_pc < 0 ? f.pc : static_cast<uint32_t>(op.origin_pc),
                                 "unstitched pseudo op in compiled code");
        }
    }
}

// Threaded execution of a tier-2 loop trace. Guard failures transfer to an
// attached bridge when present; otherwise they deoptimize, and once a guard
// has failed bridge_threshold times its continuation is traced and attached.
inline Outcome execute_loop(VmSession& s, LoopCode& code, Frame& f, int depth) {
    s.metrics().tier_transition_count++;
    LinearTrace* unit = &code.trace;
    size_t idx = 0;
    for (;;) {
        const TraceOp& op = unit->ops[idx];
        switch (op.kind) {
        case TraceOp::Kind::CallHandler: {
            uint32_t pc = static_cast<uint32_t>(op.origin_pc);
            if (!s.charge()) return Outcome::fail(ErrorKind::FuelExhausted, pc);
            s.metrics().dispatch_count++;
            if (is_call_opcode(op.opcode)) {
                if (f.stack.empty())
                    return Outcome::fail(ErrorKind::StackUnderflow, pc, "CALL argument");
                Value arg = f.pop();
                Outcome r = dispatch_call(s, static_cast<uint32_t>(op.operand),
                                          call_kind_of(op.opcode), arg, depth + 1);
                if (r.kind != Outcome::Kind::Returned) return r;
                for (const Value& v : r.ret_values) f.push(v);
                f.pc = pc + 2;
            } else {
                Instruction ins{pc, op.opcode, op.operand};
                if (auto err = exec_handler(ins, f))
                    return Outcome::fail(err->kind, err->pc, err->detail);
            }
            ++idx;
            break;
        }
        case TraceOp::Kind::Guard: {
            uint32_t pc = static_cast<uint32_t>(op.origin_pc);
            if (!s.charge()) return Outcome::fail(ErrorKind::FuelExhausted, pc);
            s.metrics().guard_check_count++;
            GuardFailure& g = unit->guards[op.guard_index];
            if (f.stack.empty())
                return Outcome::fail(ErrorKind::StackUnderflow, pc, "guard condition");
            Value cond = f.pop();
            if (truthy(cond) == g.expected) {
                ++idx;
                break;
            }
            g.failure_count++;
            if (g.bridge >= 0) {
                unit = &code.bridges[static_cast<size_t>(g.bridge)];
                idx = 0;
                f.pc = g.resume_pc;
                break;
            }
            s.metrics().deopt_count++;
            s.metrics().tier_transition_count++;
            f.pc = g.resume_pc;
            bool in_main_trace = unit == &code.trace;
            if (in_main_trace && !g.bridge_attempted &&
                g.failure_count >= s.policy().bridge_threshold) {
                g.bridge_attempted = true;
                auto t0 = std::chrono::steady_clock::now();
                LinearTrace bridge;
                bridge.kind = LinearTrace::Kind::Tier2Bridge;
                bridge.entry_pc = g.resume_pc;
                bridge.inputargs.stack_depth = f.depth();
                detail::RecordResult r =
                    detail::record_path(s, f, depth, code.header_pc, true, bridge);
                CompileRecord rec;
                rec.pc = g.resume_pc;
                rec.tier = 2;
                rec.kind = "bridge";
                rec.wall_ms = detail::ms_since(t0);
                if (r.status == detail::RecordStatus::Aborted) {
                    rec.aborted = true;
                    rec.abort_reason = trace_abort_name(r.abort);
                    s.metrics().compiles.push_back(rec);
                    return Outcome::deopt(f.pc);
                }
                rec.op_count = bridge.ops.size();
                rec.guard_count = bridge.guards.size();
                rec.segment_count = 1;
                s.metrics().compiles.push_back(rec);
                s.store_trace(g.resume_pc, "bridge", bridge);
                attach_bridge(code, op.guard_index, std::move(bridge));
                if (r.status == detail::RecordStatus::Ended) return r.outcome;
                // Recording closed at the header: continue in compiled code.
                s.metrics().tier_transition_count++;
                unit = &code.trace;
                idx = 0;
                break;
            }
            return Outcome::deopt(g.resume_pc);
        }
        case TraceOp::Kind::JumpOp: {
            if (!op.synthetic()) {
                if (!s.charge())
                    return Outcome::fail(ErrorKind::FuelExhausted,
                                         static_cast<uint32_t>(op.origin_pc));
            }
            s.metrics().transfer_count++;
            unit = &code.trace;
            idx = 0;
            f.pc = code.header_pc;
            break;
        }
        case TraceOp::Kind::RetOp: {
            uint32_t pc = static_cast<uint32_t>(op.origin_pc);
            if (!s.charge()) return Outcome::fail(ErrorKind::FuelExhausted, pc);
            s.metrics().transfer_count++;
            if (op.is_exit) {
                if (f.stack.empty()) return Outcome::fail(ErrorKind::StackUnderflow, pc, "EXIT");
                return Outcome::done(f.pop());
            }
            if (depth == 0) return Outcome::fail(ErrorKind::RetAtTopLevel, pc);
            if (f.stack.size() < op.ret_count)
                return Outcome::fail(ErrorKind::StackUnderflow, pc, "RET");
            std::vector<Value> vals(f.stack.end() - op.ret_count, f.stack.end());
            return Outcome::returned(std::move(vals));
        }
        default:
            return Outcome::fail(ErrorKind::InvalidInstruction, f.pc,
                                 "pseudo op in loop code");
        }
    }
}

// The dispatch loop for one method activation. Tier-1 methods enter stitched
// code at the activation boundary; tier-2 loops are entered (and compiled) at
// backward-jump targets. Deopts fall back here and interpretation continues.
inline Outcome run_frame(VmSession& s, Frame& frame, Regime regime, int depth,
                         uint32_t method_entry) {
    const Program& prog = s.program();

    if (regime.t1) {
        if (!s.method_code(method_entry) && !s.t1_blacklisted(method_entry)) {
            if (s.record_hot_entry(method_entry)) compile_method(s, method_entry);
        }
        if (StitchedCode* code = s.method_code(method_entry)) {
            Outcome o = execute_stitched(s, *code, frame, depth);
            if (o.kind != Outcome::Kind::Deopt) return o;
            frame.pc = o.resume_pc;
        }
    }

    for (;;) {
        uint32_t pc = frame.pc;
        if (regime.t2 && s.is_merge_point(pc)) {
            LoopCode* lc = s.loop_code(pc);
            if (!lc && !s.t2_blacklisted(pc) && s.record_hot_edge(pc)) {
                TraceLoopResult r = trace_loop(s, frame, depth);
                if (r.outcome) return *r.outcome;
                continue; // compiled: re-enter at the header; aborted: interpret on
            }
            if (lc) {
                Outcome o = execute_loop(s, *lc, frame, depth);
                if (o.kind != Outcome::Kind::Deopt) return o;
                frame.pc = o.resume_pc;
                pc = frame.pc;
            }
        }

        auto ins = prog.decode_at(pc);
        if (!ins) return Outcome::fail(ErrorKind::InvalidInstruction, pc);
        s.metrics().decode_count++;
        if (!s.charge()) return Outcome::fail(ErrorKind::FuelExhausted, pc);
        s.metrics().dispatch_count++;

        switch (ins->opcode) {
        case Opcode::Exit:
            if (frame.stack.empty())
                return Outcome::fail(ErrorKind::StackUnderflow, pc, "EXIT");
            return Outcome::done(frame.pop());
        case Opcode::Ret: {
            if (depth == 0) return Outcome::fail(ErrorKind::RetAtTopLevel, pc);
            uint8_t count = static_cast<uint8_t>(ins->operand);
            if (frame.stack.size() < count)
                return Outcome::fail(ErrorKind::StackUnderflow, pc, "RET");
            std::vector<Value> vals(frame.stack.end() - count, frame.stack.end());
            return Outcome::returned(std::move(vals));
        }
        case Opcode::Call:
        case Opcode::CallNormal:
        case Opcode::CallJit: {
            if (frame.stack.empty())
                return Outcome::fail(ErrorKind::StackUnderflow, pc, "CALL argument");
            Value arg = frame.pop();
            Outcome r = dispatch_call(s, static_cast<uint32_t>(ins->operand),
                                      call_kind_of(ins->opcode), arg, depth + 1);
            if (r.kind != Outcome::Kind::Returned) return r;
            for (const Value& v : r.ret_values) frame.push(v);
            frame.pc = ins->next_pc();
            break;
        }
        default:
            if (auto err = exec_handler(*ins, frame))
                return Outcome::fail(err->kind, err->pc, err->detail);
            break;
        }
    }
}

// Top-level entry: runs the program with [arg] as the initial stack.
inline Outcome run_program(VmSession& s, Value arg) {
    s.reset_fuel();
    Frame frame;
    frame.stack.push_back(arg);
    frame.pc = s.program().entry_pc();
    frame.program = &s.program();
    Regime regime = regime_for(s.policy().mode, s.policy().toplevel_kind);
    return run_frame(s, frame, regime, 0, s.program().entry_pc());
}

// Plain interpretation of one frame (used by oracles/tests).
inline Outcome interpret(const Program& program, uint32_t entry, Value arg, VmSession& s) {
    s.reset_fuel();
    Frame frame;
    frame.stack.push_back(arg);
    frame.pc = entry;
    frame.program = &program;
    return run_frame(s, frame, {false, false}, 0, entry);
}

} // namespace ttvm
