#pragma once

// Independent reference interpreter used as the differential oracle. It works
// straight off the raw bytes with its own opcode table and value type; it
// shares nothing with the library's execution paths.

#include <cstdint>
#include <string>
#include <vector>

namespace refvm {

enum : uint8_t {
    R_CONST_INT = 0,
    R_DUP = 1,
    R_POP = 2,
    R_ADD = 3,
    R_SUB = 4,
    R_LT = 5,
    R_EQ = 6,
    R_JUMP = 7,
    R_JUMP_IF = 8,
    R_CALL = 9,
    R_CALL_NORMAL = 10,
    R_CALL_JIT = 11,
    R_RET = 12,
    R_EXIT = 13,
};

struct RV {
    bool is_bool = false;
    int64_t v = 0;
    static RV integer(int64_t x) { return {false, x}; }
    static RV boolean(bool b) { return {true, b ? 1 : 0}; }
    bool truthy() const { return v != 0; }
    bool operator==(const RV& o) const { return is_bool == o.is_bool && v == o.v; }
};

struct RefOutcome {
    enum Kind { Done, Ret, Error, Fuel } kind = Error;
    RV value;               // Done
    std::vector<RV> rets;   // Ret
    std::string error;
};

inline RefOutcome ref_frame(const std::vector<uint8_t>& code, uint32_t pc, RV arg, int depth,
                            int64_t& fuel) {
    std::vector<RV> st{arg};
    auto need = [&](size_t n) { return st.size() >= n; };
    for (;;) {
        if (pc >= code.size()) return {RefOutcome::Error, {}, {}, "pc out of range"};
        if (fuel <= 0) return {RefOutcome::Fuel, {}, {}, "fuel"};
        --fuel;
        uint8_t op = code[pc];
        switch (op) {
        case R_CONST_INT:
            st.push_back(RV::integer(code[pc + 1]));
            pc += 2;
            break;
        case R_DUP:
            if (!need(1)) return {RefOutcome::Error, {}, {}, "underflow"};
            st.push_back(st.back());
            pc += 1;
            break;
        case R_POP:
            if (!need(1)) return {RefOutcome::Error, {}, {}, "underflow"};
            st.pop_back();
            pc += 1;
            break;
        case R_ADD:
        case R_SUB:
        case R_LT:
        case R_EQ: {
            if (!need(2)) return {RefOutcome::Error, {}, {}, "underflow"};
            RV rhs = st.back();
            st.pop_back();
            RV lhs = st.back();
            st.pop_back();
            if (lhs.is_bool || rhs.is_bool) return {RefOutcome::Error, {}, {}, "type"};
            if (op == R_ADD) st.push_back(RV::integer(lhs.v + rhs.v));
            if (op == R_SUB) st.push_back(RV::integer(lhs.v - rhs.v));
            if (op == R_LT) st.push_back(RV::boolean(lhs.v < rhs.v));
            if (op == R_EQ) st.push_back(RV::boolean(lhs.v == rhs.v));
            pc += 1;
            break;
        }
        case R_JUMP:
            pc = code[pc + 1];
            break;
        case R_JUMP_IF: {
            if (!need(1)) return {RefOutcome::Error, {}, {}, "underflow"};
            RV cond = st.back();
            st.pop_back();
            pc = cond.truthy() ? code[pc + 1] : pc + 2;
            break;
        }
        case R_CALL:
        case R_CALL_NORMAL:
        case R_CALL_JIT: {
            if (!need(1)) return {RefOutcome::Error, {}, {}, "underflow"};
            if (depth > 512) return {RefOutcome::Error, {}, {}, "call depth"};
            RV a = st.back();
            st.pop_back();
            RefOutcome r = ref_frame(code, code[pc + 1], a, depth + 1, fuel);
            if (r.kind == RefOutcome::Ret) {
                for (const RV& v : r.rets) st.push_back(v);
                pc += 2;
                break;
            }
            return r; // Done unwinds; errors propagate
        }
        case R_RET: {
            if (depth == 0) return {RefOutcome::Error, {}, {}, "ret at top level"};
            uint8_t k = code[pc + 1];
            if (!need(k)) return {RefOutcome::Error, {}, {}, "underflow"};
            RefOutcome r;
            r.kind = RefOutcome::Ret;
            r.rets.assign(st.end() - k, st.end());
            return r;
        }
        case R_EXIT: {
            if (!need(1)) return {RefOutcome::Error, {}, {}, "underflow"};
            RefOutcome r;
            r.kind = RefOutcome::Done;
            r.value = st.back();
            return r;
        }
        default:
            return {RefOutcome::Error, {}, {}, "bad opcode"};
        }
    }
}

inline RefOutcome ref_run(const std::vector<uint8_t>& code, int64_t arg,
                          int64_t fuel = 100'000'000) {
    return ref_frame(code, 0, RV::integer(arg), 0, fuel);
}

} // namespace refvm
