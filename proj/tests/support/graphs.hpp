#pragma once

// Control-flow-graph oracle (decoded straight from bytes with its own width
// table) and the graph reconstruction from stitched code, for isomorphism
// checks. Nodes are instruction pcs; edges are control successors.

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "ttvm/stitcher.hpp"

namespace testsupport {

struct Graph {
    std::set<uint32_t> nodes;
    std::set<std::pair<uint32_t, uint32_t>> edges;
    bool operator==(const Graph& o) const { return nodes == o.nodes && edges == o.edges; }
};

// Independent decode: width and successor rules written out by hand.
inline Graph cfg_from_bytes(const std::vector<uint8_t>& code, uint32_t entry) {
    Graph g;
    std::vector<uint32_t> work{entry};
    while (!work.empty()) {
        uint32_t pc = work.back();
        work.pop_back();
        if (g.nodes.count(pc) || pc >= code.size()) continue;
        uint8_t op = code[pc];
        g.nodes.insert(pc);
        auto edge = [&](uint32_t t) {
            g.edges.insert({pc, t});
            work.push_back(t);
        };
        switch (op) {
        case 7: // JUMP
            edge(code[pc + 1]);
            break;
        case 8: // JUMP_IF
            edge(code[pc + 1]);
            edge(pc + 2);
            break;
        case 12: // RET
        case 13: // EXIT
            break;
        case 0:  // CONST_INT
        case 9:  // CALL
        case 10: // CALL_NORMAL
        case 11: // CALL_JIT
            edge(pc + 2);
            break;
        default: // 1-byte stack ops
            edge(pc + 1);
            break;
        }
    }
    return g;
}

// Where a segment really starts: its first op's pc, or for a segment that is
// just a forwarding jump, the jump's target.
inline uint32_t spliced_entry(const ttvm::StitchedCode& code, const ttvm::Segment& seg) {
    for (const ttvm::TraceOp& op : seg.ops) {
        if (!op.synthetic()) return static_cast<uint32_t>(op.origin_pc);
        if (op.kind == ttvm::TraceOp::Kind::JumpOp)
            return static_cast<uint32_t>(code.token_map.token(op.token).pc);
    }
    return seg.entry_pc;
}

inline Graph graph_from_stitched(const ttvm::StitchedCode& code) {
    using ttvm::TraceOp;
    Graph g;
    for (const ttvm::Segment& seg : code.segments) {
        int64_t prev = -1;
        for (const TraceOp& op : seg.ops) {
            switch (op.kind) {
            case TraceOp::Kind::CallHandler:
            case TraceOp::Kind::Guard: {
                uint32_t pc = static_cast<uint32_t>(op.origin_pc);
                g.nodes.insert(pc);
                if (prev >= 0) g.edges.insert({static_cast<uint32_t>(prev), pc});
                prev = pc;
                break;
            }
            case TraceOp::Kind::JumpOp: {
                uint32_t target =
                    static_cast<uint32_t>(code.token_map.token(op.token).pc);
                if (!op.synthetic()) {
                    uint32_t pc = static_cast<uint32_t>(op.origin_pc);
                    g.nodes.insert(pc);
                    if (prev >= 0) g.edges.insert({static_cast<uint32_t>(prev), pc});
                    g.edges.insert({pc, target});
                } else if (prev >= 0) {
                    g.edges.insert({static_cast<uint32_t>(prev), target});
                }
                prev = -1;
                break;
            }
            case TraceOp::Kind::RetOp: {
                uint32_t pc = static_cast<uint32_t>(op.origin_pc);
                g.nodes.insert(pc);
                if (prev >= 0) g.edges.insert({static_cast<uint32_t>(prev), pc});
                prev = -1;
                break;
            }
            default:
                break; // no pseudo ops in stitched code
            }
        }
    }
    // Guard-failure edges to the spliced entry of the linked bridge.
    for (const auto& [guard_id, seg_index] : code.links) {
        const ttvm::GuardFailure& guard = code.guards.at(guard_id);
        uint32_t to = spliced_entry(code, code.segments.at(static_cast<size_t>(seg_index)));
        g.edges.insert({guard.origin_pc, to});
    }
    return g;
}

} // namespace testsupport
