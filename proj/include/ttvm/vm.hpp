#pragma once

// Umbrella header plus file loading helpers.

#include <fstream>
#include <sstream>

#include "ttvm/assembler.hpp"
#include "ttvm/bench.hpp"
#include "ttvm/bytecode.hpp"
#include "ttvm/dump.hpp"
#include "ttvm/engine.hpp"
#include "ttvm/interpreter.hpp"
#include "ttvm/metrics.hpp"
#include "ttvm/stitcher.hpp"
#include "ttvm/tiers.hpp"
#include "ttvm/trace.hpp"
#include "ttvm/tracer.hpp"
#include "ttvm/traverse_stack.hpp"
#include "ttvm/value.hpp"

namespace ttvm {

struct LoadResult {
    std::optional<Program> program;
    std::string error;
    bool ok() const { return program.has_value(); }
};

// Loads `.tla` assembly or `.tlb` raw bytecode, then validates.
inline LoadResult load_program(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return {std::nullopt, "cannot open " + path};
    std::stringstream ss;
    ss << in.rdbuf();
    std::string data = ss.str();

    Program program;
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".tlb") == 0) {
        program = Program::from_bytes(std::vector<uint8_t>(data.begin(), data.end()), path);
    } else {
        AsmResult r = assemble(data, path);
        if (!r.ok()) {
            std::string msg;
            for (const AsmError& e : r.errors) {
                msg += path + ":" + std::to_string(e.line) + ":" + std::to_string(e.col) +
                       ": " + e.message + "\n";
            }
            return {std::nullopt, msg};
        }
        program = *r.program;
    }
    ValidationReport report = program.validate();
    if (!report.ok()) {
        std::string msg;
        for (const Violation& v : report.violations)
            msg += path + ": pc " + std::to_string(v.pc) + ": " + v.message + "\n";
        return {std::nullopt, msg};
    }
    return {program, ""};
}

} // namespace ttvm
