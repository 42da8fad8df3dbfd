#pragma once

#include <string>

#include <json.hpp>

#include "ttvm/assembler.hpp"
#include "ttvm/stitcher.hpp"
#include "ttvm/tiers.hpp"
#include "ttvm/trace.hpp"

namespace ttvm {

using json = nlohmann::ordered_json;

inline json trace_op_to_json(const TraceOp& op, const std::vector<GuardFailure>& guards) {
    json j;
    j["kind"] = trace_op_kind_name(op.kind);
    if (op.synthetic())
        j["origin_pc"] = nullptr;
    else
        j["origin_pc"] = op.origin_pc;
    switch (op.kind) {
    case TraceOp::Kind::CallHandler:
        j["opcode"] = mnemonic(op.opcode);
        if (op.operand >= 0) j["operand"] = op.operand;
        break;
    case TraceOp::Kind::Guard: {
        const GuardFailure& g = guards.at(op.guard_index);
        j["guard"] = {{"id", g.guard_id},
                      {"expected", g.expected},
                      {"resume_pc", g.resume_pc},
                      {"marked", g.marked}};
        break;
    }
    case TraceOp::Kind::EmitJump:
        j["target_pc"] = op.target_pc;
        break;
    case TraceOp::Kind::JumpOp:
        j["target_pc"] = op.target_pc;
        if (op.token >= 0) j["token"] = op.token;
        break;
    case TraceOp::Kind::EmitRet:
    case TraceOp::Kind::RetOp:
        j["ret_count"] = op.ret_count;
        j["exit"] = op.is_exit;
        break;
    }
    return j;
}

inline json linear_trace_to_json(const LinearTrace& trace) {
    json ops = json::array();
    for (const TraceOp& op : trace.ops) ops.push_back(trace_op_to_json(op, trace.guards));
    json j;
    j["kind"] = trace_kind_name(trace.kind);
    j["entry_pc"] = trace.entry_pc;
    j["inputargs"] = {{"stack_depth", trace.inputargs.stack_depth}};
    j["op_count"] = trace.ops.size();
    j["guard_count"] = trace.guards.size();
    j["ops"] = ops;
    return j;
}

inline json stitched_to_json(const StitchedCode& code) {
    json segments = json::array();
    for (size_t i = 0; i < code.segments.size(); ++i) {
        const Segment& s = code.segments[i];
        json ops = json::array();
        for (const TraceOp& op : s.ops) ops.push_back(trace_op_to_json(op, code.guards));
        segments.push_back({{"index", i},
                            {"role", i == 0 ? "body" : "bridge"},
                            {"entry_pc", s.entry_pc},
                            {"op_count", s.ops.size()},
                            {"ops", ops}});
    }
    json links = json::array();
    for (const auto& [guard_id, seg] : code.links)
        links.push_back({{"guard_id", guard_id}, {"segment", seg}});
    json j;
    j["entry_pc"] = code.entry_pc;
    j["segment_count"] = code.segments.size();
    j["op_count"] = code.op_count();
    j["segments"] = segments;
    j["links"] = links;
    return j;
}

inline std::string trace_op_text(const TraceOp& op, const std::vector<GuardFailure>& guards) {
    std::string pc = op.synthetic() ? std::string("  --") : std::to_string(op.origin_pc);
    while (pc.size() < 4) pc.insert(pc.begin(), ' ');
    std::string line = pc + "  ";
    switch (op.kind) {
    case TraceOp::Kind::CallHandler:
        line += "call ";
        line += mnemonic(op.opcode);
        if (op.operand >= 0) line += " " + std::to_string(op.operand);
        break;
    case TraceOp::Kind::Guard: {
        const GuardFailure& g = guards.at(op.guard_index);
        line += "guard g" + std::to_string(g.guard_id) + " expect " +
                (g.expected ? "true" : "false") + " resume " + std::to_string(g.resume_pc) +
                (g.marked ? " (marked)" : "");
        break;
    }
    case TraceOp::Kind::EmitJump:
        line += "emit_jump -> " + std::to_string(op.target_pc);
        break;
    case TraceOp::Kind::EmitRet:
        line += std::string("emit_ret ") + (op.is_exit ? "(exit)" : "");
        break;
    case TraceOp::Kind::JumpOp:
        line += "jump -> " + std::to_string(op.target_pc);
        break;
    case TraceOp::Kind::RetOp:
        line += op.is_exit ? "ret (exit)" : "ret " + std::to_string(op.ret_count);
        break;
    }
    return line;
}

inline std::string linear_trace_to_text(const LinearTrace& trace) {
    std::string out = std::string(trace_kind_name(trace.kind)) + " trace @" +
                      std::to_string(trace.entry_pc) + " (" + std::to_string(trace.ops.size()) +
                      " ops, " + std::to_string(trace.guards.size()) + " guards)\n";
    for (const TraceOp& op : trace.ops) out += trace_op_text(op, trace.guards) + "\n";
    return out;
}

inline std::string stitched_to_text(const StitchedCode& code) {
    std::string out = "stitched @" + std::to_string(code.entry_pc) + " (" +
                      std::to_string(code.segments.size()) + " segments)\n";
    for (size_t i = 0; i < code.segments.size(); ++i) {
        const Segment& s = code.segments[i];
        out += (i == 0 ? "body" : "bridge " + std::to_string(i));
        out += " @" + std::to_string(s.entry_pc) + ":\n";
        for (const TraceOp& op : s.ops) out += trace_op_text(op, code.guards) + "\n";
    }
    for (const auto& [guard_id, seg] : code.links)
        out += "link g" + std::to_string(guard_id) + " -> segment " + std::to_string(seg) + "\n";
    return out;
}

namespace detail {

inline std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\l";
            continue;
        }
        out += c;
    }
    return out;
}

} // namespace detail

// Segment boxes with guard-failure edges to their bridges and terminator
// edges to their jump targets.
inline std::string stitched_to_dot(const StitchedCode& code, const std::string& title) {
    std::string out = "digraph stitched {\n";
    out += "  graph [label=\"" + detail::dot_escape(title) + "\", labelloc=t];\n";
    out += "  node [shape=box, fontname=\"monospace\"];\n";
    for (size_t i = 0; i < code.segments.size(); ++i) {
        const Segment& s = code.segments[i];
        std::string label = (i == 0 ? "body" : "bridge " + std::to_string(i));
        label += " @" + std::to_string(s.entry_pc) + "\n";
        for (const TraceOp& op : s.ops) label += trace_op_text(op, code.guards) + "\n";
        out += "  seg" + std::to_string(i) + " [label=\"" + detail::dot_escape(label) + "\"" +
               (i == 0 ? ", style=filled, fillcolor=lightgrey" : "") + "];\n";
    }
    for (const auto& [guard_id, seg] : code.links) {
        // Guard-fail edge from the segment holding the guard to its bridge.
        int from = 0;
        for (size_t i = 0; i < code.segments.size(); ++i)
            for (const TraceOp& op : code.segments[i].ops)
                if (op.kind == TraceOp::Kind::Guard && op.guard_index == guard_id)
                    from = static_cast<int>(i);
        out += "  seg" + std::to_string(from) + " -> seg" + std::to_string(seg) +
               " [label=\"g" + std::to_string(guard_id) + " fail\", color=red];\n";
    }
    for (size_t i = 0; i < code.segments.size(); ++i) {
        const TraceOp& term = code.segments[i].ops.back();
        if (term.kind != TraceOp::Kind::JumpOp) continue;
        auto it = code.pc_index.find(term.target_pc);
        if (it == code.pc_index.end()) continue;
        out += "  seg" + std::to_string(i) + " -> seg" + std::to_string(it->second.first) +
               " [label=\"jump " + std::to_string(term.target_pc) + "\"];\n";
    }
    out += "}\n";
    return out;
}

inline std::string loop_code_to_dot(const LoopCode& code, const std::string& title) {
    std::string out = "digraph loop {\n";
    out += "  graph [label=\"" + detail::dot_escape(title) + "\", labelloc=t];\n";
    out += "  node [shape=box, fontname=\"monospace\"];\n";
    auto emit_unit = [&](const LinearTrace& tr, const std::string& id, const std::string& role) {
        std::string label = role + " @" + std::to_string(tr.entry_pc) + "\n";
        for (const TraceOp& op : tr.ops) label += trace_op_text(op, tr.guards) + "\n";
        out += "  " + id + " [label=\"" + detail::dot_escape(label) + "\"" +
               (role == "loop" ? ", style=filled, fillcolor=lightgrey" : "") + "];\n";
    };
    emit_unit(code.trace, "loop0", "loop");
    for (size_t i = 0; i < code.bridges.size(); ++i)
        emit_unit(code.bridges[i], "bridge" + std::to_string(i), "bridge");
    for (const GuardFailure& g : code.trace.guards) {
        if (g.bridge < 0) continue;
        out += "  loop0 -> bridge" + std::to_string(g.bridge) + " [label=\"g" +
               std::to_string(g.guard_id) + " fail\", color=red];\n";
    }
    out += "  loop0 -> loop0 [label=\"jump " + std::to_string(code.header_pc) + "\"];\n";
    for (size_t i = 0; i < code.bridges.size(); ++i) {
        const TraceOp& term = code.bridges[i].ops.back();
        if (term.kind == TraceOp::Kind::JumpOp)
            out += "  bridge" + std::to_string(i) + " -> loop0 [label=\"jump " +
                   std::to_string(code.header_pc) + "\"];\n";
    }
    out += "}\n";
    return out;
}

// Control-flow graph straight from the decoded program.
inline std::string cfg_to_dot(const Program& program, const std::string& title) {
    std::string out = "digraph cfg {\n";
    out += "  graph [label=\"" + detail::dot_escape(title) + "\", labelloc=t];\n";
    out += "  node [shape=box, fontname=\"monospace\"];\n";
    for (uint32_t pc : program.all_reachable()) {
        auto ins = program.decode_at(pc);
        std::string label = std::to_string(pc) + ": " + mnemonic(ins->opcode);
        if (ins->operand >= 0) label += " " + std::to_string(ins->operand);
        out += "  pc" + std::to_string(pc) + " [label=\"" + detail::dot_escape(label) + "\"];\n";
        if (ins->opcode == Opcode::JumpIf) {
            out += "  pc" + std::to_string(pc) + " -> pc" + std::to_string(ins->operand) +
                   " [label=\"T\"];\n";
            out += "  pc" + std::to_string(pc) + " -> pc" + std::to_string(ins->next_pc()) +
                   " [label=\"F\"];\n";
        } else {
            for (uint32_t succ : Program::successors(*ins))
                out += "  pc" + std::to_string(pc) + " -> pc" + std::to_string(succ) + ";\n";
        }
    }
    out += "}\n";
    return out;
}

} // namespace ttvm
