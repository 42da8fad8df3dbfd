#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ttvm {

// Instruction set of the VM's stack bytecode. Operands are single unsigned
// bytes, so any jump or call target must fit in 0..255.
enum class Opcode : uint8_t {
    ConstInt = 0,
    Dup,
    Pop,
    Add,
    Sub,
    Lt,
    Eq,
    Jump,
    JumpIf,
    Call,
    CallNormal,
    CallJit,
    Ret,
    Exit,
};

constexpr int kOpcodeCount = 14;

inline int operand_arity(Opcode op) {
    switch (op) {
    case Opcode::ConstInt:
    case Opcode::Jump:
    case Opcode::JumpIf:
    case Opcode::Call:
    case Opcode::CallNormal:
    case Opcode::CallJit:
    case Opcode::Ret:
        return 1;
    default:
        return 0;
    }
}

inline const char* mnemonic(Opcode op) {
    switch (op) {
    case Opcode::ConstInt: return "CONST_INT";
    case Opcode::Dup: return "DUP";
    case Opcode::Pop: return "POP";
    case Opcode::Add: return "ADD";
    case Opcode::Sub: return "SUB";
    case Opcode::Lt: return "LT";
    case Opcode::Eq: return "EQ";
    case Opcode::Jump: return "JUMP";
    case Opcode::JumpIf: return "JUMP_IF";
    case Opcode::Call: return "CALL";
    case Opcode::CallNormal: return "CALL_NORMAL";
    case Opcode::CallJit: return "CALL_JIT";
    case Opcode::Ret: return "RET";
    case Opcode::Exit: return "EXIT";
    }
    return "?";
}

inline bool is_call_opcode(Opcode op) {
    return op == Opcode::Call || op == Opcode::CallNormal || op == Opcode::CallJit;
}

struct Instruction {
    uint32_t pc = 0;
    Opcode opcode = Opcode::Exit;
    int operand = -1; // -1 when the opcode takes no operand

    uint32_t width() const { return 1 + static_cast<uint32_t>(operand_arity(opcode)); }
    uint32_t next_pc() const { return pc + width(); }
};

struct Violation {
    uint32_t pc = 0;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

// Decoded, immutable bytecode unit. Shareable across threads once built.
class Program {
public:
    Program() = default;
    static Program from_bytes(std::vector<uint8_t> code, std::string name = "<bytes>",
                              uint32_t entry_pc = 0) {
        Program p;
        p.code_ = std::move(code);
        p.name_ = std::move(name);
        p.entry_pc_ = entry_pc;
        return p;
    }

    const std::vector<uint8_t>& code() const { return code_; }
    uint32_t entry_pc() const { return entry_pc_; }
    const std::string& source_name() const { return name_; }
    uint32_t size() const { return static_cast<uint32_t>(code_.size()); }

    std::optional<Instruction> decode_at(uint32_t pc) const {
        if (pc >= code_.size()) return std::nullopt;
        uint8_t raw = code_[pc];
        if (raw >= kOpcodeCount) return std::nullopt;
        Instruction ins;
        ins.pc = pc;
        ins.opcode = static_cast<Opcode>(raw);
        if (operand_arity(ins.opcode) == 1) {
            if (pc + 1 >= code_.size()) return std::nullopt;
            ins.operand = code_[pc + 1];
        }
        return ins;
    }

    // Intraprocedural successor pcs. Calls fall through to the return point;
    // RET and EXIT have no successors.
    static std::vector<uint32_t> successors(const Instruction& ins) {
        switch (ins.opcode) {
        case Opcode::Jump:
            return {static_cast<uint32_t>(ins.operand)};
        case Opcode::JumpIf:
            return {ins.next_pc(), static_cast<uint32_t>(ins.operand)};
        case Opcode::Ret:
        case Opcode::Exit:
            return {};
        default:
            return {ins.next_pc()};
        }
    }

    // Instruction pcs reachable from `from` without entering callees.
    std::set<uint32_t> reachable_pcs(uint32_t from) const {
        std::set<uint32_t> seen;
        std::vector<uint32_t> work{from};
        while (!work.empty()) {
            uint32_t pc = work.back();
            work.pop_back();
            if (seen.count(pc)) continue;
            auto ins = decode_at(pc);
            if (!ins) continue;
            seen.insert(pc);
            for (uint32_t s : successors(*ins)) work.push_back(s);
        }
        return seen;
    }

    // Targets of backward jumps (loop headers): profiling merge points.
    std::set<uint32_t> backward_jump_targets() const {
        std::set<uint32_t> out;
        for (uint32_t pc : all_reachable()) {
            auto ins = decode_at(pc);
            if (!ins) continue;
            if (ins->opcode == Opcode::Jump || ins->opcode == Opcode::JumpIf) {
                uint32_t t = static_cast<uint32_t>(ins->operand);
                if (t <= pc) out.insert(t);
            }
        }
        return out;
    }

    std::set<uint32_t> call_targets() const {
        std::set<uint32_t> out;
        for (uint32_t pc : all_reachable()) {
            auto ins = decode_at(pc);
            if (ins && is_call_opcode(ins->opcode)) out.insert(static_cast<uint32_t>(ins->operand));
        }
        return out;
    }

    // Method entries: the program entry plus every call target.
    std::set<uint32_t> method_entries() const {
        std::set<uint32_t> out = call_targets();
        out.insert(entry_pc_);
        return out;
    }

    // Union of pcs reachable from the entry and from every call target.
    std::set<uint32_t> all_reachable() const {
        std::set<uint32_t> seen;
        std::vector<uint32_t> work{entry_pc_};
        while (!work.empty()) {
            uint32_t pc = work.back();
            work.pop_back();
            if (seen.count(pc)) continue;
            auto ins = decode_at(pc);
            if (!ins) continue;
            seen.insert(pc);
            for (uint32_t s : successors(*ins)) work.push_back(s);
            if (is_call_opcode(ins->opcode)) work.push_back(static_cast<uint32_t>(ins->operand));
        }
        return seen;
    }

    ValidationReport validate() const {
        ValidationReport report;
        auto violation = [&](uint32_t pc, std::string msg) {
            report.violations.push_back({pc, std::move(msg)});
        };

        // Walk from the entry and all call/jump targets, checking that every
        // reachable boundary decodes, operands are in range, and targets land
        // on instruction boundaries.
        std::set<uint32_t> boundaries;
        std::vector<uint32_t> work{entry_pc_};
        std::set<uint32_t> enqueued{entry_pc_};
        while (!work.empty()) {
            uint32_t pc = work.back();
            work.pop_back();
            if (boundaries.count(pc)) continue;
            if (pc >= code_.size()) {
                violation(pc, "target out of range");
                continue;
            }
            uint8_t raw = code_[pc];
            if (raw >= kOpcodeCount) {
                violation(pc, "undecodable opcode byte " + std::to_string(raw));
                continue;
            }
            Opcode op = static_cast<Opcode>(raw);
            if (operand_arity(op) == 1 && pc + 1 >= code_.size()) {
                violation(pc, std::string("truncated operand for ") + mnemonic(op));
                continue;
            }
            boundaries.insert(pc);
            Instruction ins = *decode_at(pc);
            auto enqueue = [&](uint32_t t) {
                if (!enqueued.count(t)) {
                    enqueued.insert(t);
                    work.push_back(t);
                }
            };
            for (uint32_t s : successors(ins)) enqueue(s);
            if (is_call_opcode(ins.opcode)) enqueue(static_cast<uint32_t>(ins.operand));
        }

        // Tiling: no reachable instruction may start inside another one.
        for (uint32_t pc : boundaries) {
            Instruction ins = *decode_at(pc);
            for (uint32_t q = pc + 1; q < ins.next_pc(); ++q) {
                if (boundaries.count(q))
                    violation(q, "instruction boundary overlaps instruction at " + std::to_string(pc));
            }
        }

        check_stack_depths(report);
        return report;
    }

private:
    // Static stack-depth analysis per method: every pc must be reached with
    // one consistent depth, and no instruction may consume below zero.
    void check_stack_depths(ValidationReport& report) const {
        for (uint32_t entry : method_entries()) {
            std::map<uint32_t, int> depth_at;
            std::vector<std::pair<uint32_t, int>> work{{entry, 1}}; // [arg]
            while (!work.empty()) {
                auto [pc, depth] = work.back();
                work.pop_back();
                auto it = depth_at.find(pc);
                if (it != depth_at.end()) {
                    if (it->second != depth)
                        report.violations.push_back(
                            {pc, "inconsistent stack depth at join: " + std::to_string(it->second) +
                                     " vs " + std::to_string(depth)});
                    continue;
                }
                auto ins = decode_at(pc);
                if (!ins) continue; // already reported by the reachability walk
                depth_at[pc] = depth;
                int pops = 0, pushes = 0;
                switch (ins->opcode) {
                case Opcode::ConstInt: pushes = 1; break;
                case Opcode::Dup: pops = 1; pushes = 2; break;
                case Opcode::Pop: pops = 1; break;
                case Opcode::Add:
                case Opcode::Sub:
                case Opcode::Lt:
                case Opcode::Eq: pops = 2; pushes = 1; break;
                case Opcode::Jump: break;
                case Opcode::JumpIf: pops = 1; break;
                case Opcode::Call:
                case Opcode::CallNormal:
                case Opcode::CallJit: pops = 1; pushes = 1; break;
                case Opcode::Ret: pops = ins->operand; break;
                case Opcode::Exit: pops = 1; break;
                }
                if (depth < pops) {
                    report.violations.push_back({pc, std::string("stack underflow at ") +
                                                         mnemonic(ins->opcode)});
                    continue;
                }
                int next_depth = depth - pops + pushes;
                for (uint32_t s : successors(*ins)) work.push_back({s, next_depth});
            }
        }
    }

    std::vector<uint8_t> code_;
    uint32_t entry_pc_ = 0;
    std::string name_;
};

} // namespace ttvm
