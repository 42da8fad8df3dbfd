#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ttvm/bytecode.hpp"
#include "ttvm/value.hpp"

namespace ttvm {

struct Frame {
    std::vector<Value> stack;
    uint32_t pc = 0;
    const Program* program = nullptr;

    Value pop() {
        Value v = stack.back();
        stack.pop_back();
        return v;
    }
    void push(Value v) { stack.push_back(v); }
    uint32_t depth() const { return static_cast<uint32_t>(stack.size()); }
};

enum class ErrorKind {
    StackUnderflow,
    TypeError,
    FuelExhausted,
    CallDepthExceeded,
    RetAtTopLevel,
    InvalidInstruction,
};

inline const char* error_kind_name(ErrorKind k) {
    switch (k) {
    case ErrorKind::StackUnderflow: return "stack underflow";
    case ErrorKind::TypeError: return "type error";
    case ErrorKind::FuelExhausted: return "step limit exceeded";
    case ErrorKind::CallDepthExceeded: return "call depth exceeded";
    case ErrorKind::RetAtTopLevel: return "RET outside a call";
    case ErrorKind::InvalidInstruction: return "invalid instruction";
    }
    return "?";
}

struct VmError {
    ErrorKind kind = ErrorKind::InvalidInstruction;
    uint32_t pc = 0;
    std::string detail;

    std::string message() const {
        std::string m = error_kind_name(kind);
        m += " at pc " + std::to_string(pc);
        if (!detail.empty()) m += ": " + detail;
        return m;
    }
};

// Result of running a frame to completion.
//   Done     - the program finished via EXIT (unwinds all frames)
//   Returned - a callee finished via RET k (k values for the caller)
//   Deopt    - compiled code handed control back at resume_pc (internal)
//   Error    - a runtime fault
struct Outcome {
    enum class Kind { Done, Returned, Deopt, Error };
    Kind kind = Kind::Error;
    Value value;                   // Done
    std::vector<Value> ret_values; // Returned
    uint32_t resume_pc = 0;        // Deopt
    VmError error;                 // Error

    static Outcome done(Value v) {
        Outcome o;
        o.kind = Kind::Done;
        o.value = v;
        return o;
    }
    static Outcome returned(std::vector<Value> vs) {
        Outcome o;
        o.kind = Kind::Returned;
        o.ret_values = std::move(vs);
        return o;
    }
    static Outcome deopt(uint32_t pc) {
        Outcome o;
        o.kind = Kind::Deopt;
        o.resume_pc = pc;
        return o;
    }
    static Outcome fail(ErrorKind k, uint32_t pc, std::string detail = "") {
        Outcome o;
        o.kind = Kind::Error;
        o.error = {k, pc, std::move(detail)};
        return o;
    }
    bool is_done() const { return kind == Kind::Done; }
    bool is_error() const { return kind == Kind::Error; }
};

// One opcode handler shared by interpretation, trace recording, and compiled
// execution: the state transition applied here is the only definition of each
// opcode's semantics. Handles the pure stack/control opcodes; CALL*, RET and
// EXIT are control effects owned by the dispatcher. Updates frame.pc.
inline std::optional<VmError> exec_handler(const Instruction& ins, Frame& frame) {
    switch (ins.opcode) {
    case Opcode::ConstInt:
        frame.push(Value::from_int(ins.operand));
        frame.pc = ins.next_pc();
        return std::nullopt;
    case Opcode::Dup:
        if (frame.stack.empty()) return VmError{ErrorKind::StackUnderflow, ins.pc, "DUP"};
        frame.push(frame.stack.back());
        frame.pc = ins.next_pc();
        return std::nullopt;
    case Opcode::Pop:
        if (frame.stack.empty()) return VmError{ErrorKind::StackUnderflow, ins.pc, "POP"};
        frame.stack.pop_back();
        frame.pc = ins.next_pc();
        return std::nullopt;
    case Opcode::Add:
    case Opcode::Sub:
    case Opcode::Lt:
    case Opcode::Eq: {
        if (frame.stack.size() < 2)
            return VmError{ErrorKind::StackUnderflow, ins.pc, mnemonic(ins.opcode)};
        Value rhs = frame.pop();
        Value lhs = frame.pop();
        if (!rhs.is_int() || !lhs.is_int())
            return VmError{ErrorKind::TypeError, ins.pc,
                           std::string(mnemonic(ins.opcode)) + " requires two integers"};
        switch (ins.opcode) {
        case Opcode::Add: frame.push(Value::from_int(lhs.as_int() + rhs.as_int())); break;
        case Opcode::Sub: frame.push(Value::from_int(lhs.as_int() - rhs.as_int())); break;
        case Opcode::Lt: frame.push(Value::from_bool(lhs.as_int() < rhs.as_int())); break;
        default: frame.push(Value::from_bool(lhs.as_int() == rhs.as_int())); break;
        }
        frame.pc = ins.next_pc();
        return std::nullopt;
    }
    case Opcode::Jump:
        frame.pc = static_cast<uint32_t>(ins.operand);
        return std::nullopt;
    case Opcode::JumpIf: {
        if (frame.stack.empty()) return VmError{ErrorKind::StackUnderflow, ins.pc, "JUMP_IF"};
        Value cond = frame.pop();
        frame.pc = truthy(cond) ? static_cast<uint32_t>(ins.operand) : ins.next_pc();
        return std::nullopt;
    }
    default:
        return VmError{ErrorKind::InvalidInstruction, ins.pc,
                       std::string(mnemonic(ins.opcode)) + " is a dispatcher opcode"};
    }
}

} // namespace ttvm
