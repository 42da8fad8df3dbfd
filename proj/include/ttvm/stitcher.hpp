#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ttvm/trace.hpp"

namespace ttvm {

// Labels a jump destination: either a program counter or the synthetic
// return target (pc < 0).
struct TargetToken {
    int id = -1;
    int pc = -1;
    bool is_return() const { return pc < 0; }
};

class TokenMap {
public:
    int intern_pc(uint32_t pc) {
        auto it = by_pc_.find(pc);
        if (it != by_pc_.end()) return it->second;
        int id = static_cast<int>(tokens_.size());
        tokens_.push_back({id, static_cast<int>(pc)});
        by_pc_[pc] = id;
        return id;
    }
    int ensure_return_token() {
        if (ret_token_ < 0) {
            ret_token_ = static_cast<int>(tokens_.size());
            tokens_.push_back({ret_token_, -1});
        }
        return ret_token_;
    }
    std::optional<int> lookup(uint32_t pc) const {
        auto it = by_pc_.find(pc);
        if (it == by_pc_.end()) return std::nullopt;
        return it->second;
    }
    const TargetToken& token(int id) const { return tokens_.at(static_cast<size_t>(id)); }
    int return_token() const { return ret_token_; }
    size_t size() const { return tokens_.size(); }
    const std::map<uint32_t, int>& by_pc() const { return by_pc_; }

private:
    std::map<uint32_t, int> by_pc_;
    std::vector<TargetToken> tokens_;
    int ret_token_ = -1;
};

// One token per distinct EmitJump target, plus a synthetic return token.
inline TokenMap create_token_map(const std::vector<TraceOp>& ops) {
    TokenMap map;
    for (const TraceOp& op : ops)
        if (op.kind == TraceOp::Kind::EmitJump) map.intern_pc(op.target_pc);
    map.ensure_return_token();
    return map;
}

// LIFO of pending guard failures; pushes happen at marked guards, pops right
// after each emit that cuts the trace.
class GuardFailureStack {
public:
    void push(uint32_t guard_id) { ids_.push_back(guard_id); }
    std::optional<uint32_t> pop() {
        if (ids_.empty()) return std::nullopt;
        uint32_t id = ids_.back();
        ids_.pop_back();
        return id;
    }
    size_t size() const { return ids_.size(); }
    bool empty() const { return ids_.empty(); }

private:
    std::vector<uint32_t> ids_;
};

inline std::optional<uint32_t> pop_guard_failure(GuardFailureStack& stack) {
    return stack.pop();
}

// Rewrites an EmitJump pseudo op into a segment-terminating JumpOp.
inline TraceOp handle_emit_jump(const TraceOp& op, const TokenMap& token_map) {
    if (op.kind != TraceOp::Kind::EmitJump)
        throw std::logic_error("handle_emit_jump: not an emit_jump op");
    auto token = token_map.lookup(op.target_pc);
    if (!token)
        throw std::logic_error("handle_emit_jump: no token for pc " +
                               std::to_string(op.target_pc));
    return TraceOp::jump_op(op.origin_pc, *token, op.target_pc);
}

// Rewrites an EmitRet pseudo op into a segment-terminating RetOp.
inline TraceOp handle_emit_ret(const TraceOp& op) {
    if (op.kind != TraceOp::Kind::EmitRet)
        throw std::logic_error("handle_emit_ret: not an emit_ret op");
    return TraceOp::ret_op(op.origin_pc, op.ret_count, op.is_exit);
}

struct Segment {
    std::vector<TraceOp> ops; // ends with exactly one JumpOp or RetOp
    uint32_t entry_pc = 0;
};

// Output of the stitching scan: each segment paired with the guard failure
// popped when it was closed. That guard's bridge is the *next* segment; the
// final pop finds the stack empty, which marks the first segment as the body.
struct StitchPair {
    Segment segment;
    std::optional<uint32_t> guard_id;
};

inline uint32_t segment_entry_pc(const Segment& s) {
    for (const TraceOp& op : s.ops) {
        if (!op.synthetic()) return static_cast<uint32_t>(op.origin_pc);
        if (op.kind == TraceOp::Kind::JumpOp || op.kind == TraceOp::Kind::EmitJump)
            return op.target_pc;
    }
    throw std::logic_error("segment with no entry pc");
}

// Single left-to-right scan over a method trace. Marked guards push their
// failure descriptor; EmitJump/EmitRet close the current segment with a
// terminator and pop one guard failure. Pre-terminated JumpOp/RetOp inputs
// close the scan outright.
inline std::vector<StitchPair> do_trace_stitching(const LinearTrace& trace,
                                                  const TokenMap& token_map) {
    std::vector<StitchPair> result;
    GuardFailureStack gf_stack;
    std::vector<TraceOp> current;

    auto close = [&](TraceOp terminator) {
        if (result.empty() && current.empty())
            throw std::logic_error("emit with no preceding op");
        current.push_back(terminator);
        Segment seg;
        seg.ops = std::move(current);
        seg.entry_pc = segment_entry_pc(seg);
        current.clear();
        result.push_back({std::move(seg), pop_guard_failure(gf_stack)});
    };

    for (const TraceOp& op : trace.ops) {
        switch (op.kind) {
        case TraceOp::Kind::Guard:
            if (trace.guards.at(op.guard_index).marked) gf_stack.push(op.guard_index);
            current.push_back(op);
            break;
        case TraceOp::Kind::EmitJump:
            close(handle_emit_jump(op, token_map));
            break;
        case TraceOp::Kind::EmitRet:
            close(handle_emit_ret(op));
            break;
        case TraceOp::Kind::JumpOp:
        case TraceOp::Kind::RetOp:
            close(op);
            goto scan_done;
        default:
            current.push_back(op);
            break;
        }
    }
scan_done:
    if (!current.empty())
        throw std::logic_error("trace does not end with an emit or terminator");
    if (!gf_stack.empty())
        throw std::logic_error("guard failure stack not drained: " +
                               std::to_string(gf_stack.size()) + " left");
    return result;
}

// The executable unit produced by stitching: one body segment plus bridge
// segments, each bridge linked from the marked guard whose failure it
// continues.
struct StitchedCode {
    uint32_t entry_pc = 0;
    std::vector<Segment> segments; // [0] is the body
    std::vector<GuardFailure> guards;
    std::map<uint32_t, int> links; // guard_id -> bridge segment index
    TokenMap token_map;
    // first op recorded at each origin pc -> (segment, offset)
    std::map<uint32_t, std::pair<int, int>> pc_index;

    const Segment& body() const { return segments.front(); }
    size_t bridge_count() const { return segments.size() - 1; }
    size_t op_count() const {
        size_t n = 0;
        for (const auto& s : segments) n += s.ops.size();
        return n;
    }
};

// Resolve the pairing into linked code: the guard popped at segment k's close
// is attached to segment k+1, the body is the segment whose predecessor pop
// yielded nothing, and every bridge entry must equal its guard's resume pc.
inline StitchedCode link_segments(std::vector<StitchPair> pairs, TokenMap token_map,
                                  const LinearTrace& trace) {
    if (pairs.empty()) throw std::logic_error("link_segments: no segments");

    StitchedCode code;
    code.token_map = std::move(token_map);
    code.guards = trace.guards;
    code.entry_pc = trace.entry_pc;

    for (size_t k = 0; k < pairs.size(); ++k) {
        if (pairs[k].guard_id) {
            if (k + 1 >= pairs.size())
                throw std::logic_error("guard popped at the final segment has no bridge");
            uint32_t gid = *pairs[k].guard_id;
            const GuardFailure& g = code.guards.at(gid);
            uint32_t bridge_entry = pairs[k + 1].segment.entry_pc;
            if (bridge_entry != g.resume_pc)
                throw std::logic_error("bridge entry pc " + std::to_string(bridge_entry) +
                                       " != guard resume pc " + std::to_string(g.resume_pc));
            if (code.links.count(gid)) throw std::logic_error("guard linked twice");
            code.links[gid] = static_cast<int>(k + 1);
            code.guards[gid].bridge = static_cast<int>(k + 1);
        } else if (k + 1 != pairs.size()) {
            throw std::logic_error("empty guard pop before the final segment");
        }
        code.segments.push_back(std::move(pairs[k].segment));
    }

    size_t marked = 0;
    for (const auto& g : code.guards)
        if (g.marked) ++marked;
    if (code.links.size() != marked)
        throw std::logic_error("guard/bridge link is not a bijection");

    for (size_t s = 0; s < code.segments.size(); ++s) {
        const auto& ops = code.segments[s].ops;
        for (size_t i = 0; i < ops.size(); ++i) {
            if (ops[i].synthetic()) continue;
            uint32_t pc = static_cast<uint32_t>(ops[i].origin_pc);
            if (!code.pc_index.count(pc))
                code.pc_index[pc] = {static_cast<int>(s), static_cast<int>(i)};
        }
    }
    return code;
}

// Convenience pipeline over a method trace.
inline StitchedCode stitch_trace(const LinearTrace& trace) {
    TokenMap tokens = create_token_map(trace.ops);
    auto pairs = do_trace_stitching(trace, tokens);
    return link_segments(std::move(pairs), std::move(tokens), trace);
}

} // namespace ttvm
