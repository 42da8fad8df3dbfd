#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ttvm/bytecode.hpp"

namespace ttvm {

// Assembly grammar, one instruction per line:
//   line    = [label ":"] [mnemonic [operand]] [comment]
//   comment = "#" to end of line
//   operand = decimal integer 0..255, or a label reference
// Mnemonics are case-insensitive. A purely numeric label is treated as a pc
// annotation and must equal the current offset (this is what disassembly
// emits, so disassembled text re-assembles byte-identically). Programs are
// limited to 256 bytes because operands are single bytes.

struct AsmError {
    int line = 0;
    int col = 0;
    std::string message;
};

struct AsmResult {
    std::optional<Program> program;
    std::vector<AsmError> errors;
    bool ok() const { return program.has_value(); }
};

namespace detail {

inline std::optional<Opcode> opcode_from_mnemonic(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    for (int i = 0; i < kOpcodeCount; ++i) {
        Opcode op = static_cast<Opcode>(i);
        if (s == mnemonic(op)) return op;
    }
    return std::nullopt;
}

inline bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Decimal literal; rejects mixed tokens like "12ab" and oversized numbers.
inline std::optional<unsigned long> parse_number(const std::string& s) {
    if (s.empty() || s.size() > 6) return std::nullopt;
    unsigned long v = 0;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
        v = v * 10 + static_cast<unsigned long>(c - '0');
    }
    return v;
}

} // namespace detail

inline AsmResult assemble(const std::string& source, std::string name = "<asm>") {
    AsmResult result;
    std::vector<uint8_t> code;
    std::map<std::string, uint32_t> labels;
    struct Fixup {
        std::string label;
        uint32_t offset; // byte to patch
        int line;
        int col;
    };
    std::vector<Fixup> fixups;

    auto error = [&](int line, int col, std::string msg) {
        result.errors.push_back({line, col, std::move(msg)});
    };

    int line_no = 0;
    size_t pos = 0;
    while (pos <= source.size()) {
        size_t eol = source.find('\n', pos);
        std::string line = source.substr(pos, eol == std::string::npos ? std::string::npos
                                                                       : eol - pos);
        pos = eol == std::string::npos ? source.size() + 1 : eol + 1;
        ++line_no;

        if (auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);

        // Tokenize into words, remembering columns; ':' binds to the label.
        struct Tok {
            std::string text;
            int col;
            bool label;
        };
        std::vector<Tok> toks;
        size_t i = 0;
        bool bad_char = false;
        while (i < line.size()) {
            if (std::isspace(static_cast<unsigned char>(line[i]))) {
                ++i;
                continue;
            }
            size_t start = i;
            while (i < line.size() && detail::is_ident_char(line[i])) ++i;
            if (i == start) {
                error(line_no, static_cast<int>(start + 1),
                      std::string("unexpected character '") + line[i] + "'");
                bad_char = true;
                break;
            }
            bool is_label = i < line.size() && line[i] == ':';
            toks.push_back({line.substr(start, i - start), static_cast<int>(start + 1), is_label});
            if (is_label) ++i;
        }
        if (bad_char) continue;
        if (toks.empty()) continue;

        size_t t = 0;
        if (toks[t].label) {
            const std::string& lbl = toks[t].text;
            bool numeric = std::isdigit(static_cast<unsigned char>(lbl[0]));
            if (numeric) {
                // pc annotation: must match the current offset
                auto v = detail::parse_number(lbl);
                if (!v || *v != code.size())
                    error(line_no, toks[t].col,
                          "pc label " + lbl + " does not match offset " +
                              std::to_string(code.size()));
            } else if (labels.count(lbl)) {
                error(line_no, toks[t].col, "duplicate label '" + lbl + "'");
            } else {
                labels[lbl] = static_cast<uint32_t>(code.size());
            }
            ++t;
        }
        if (t == toks.size()) continue; // label-only line

        if (toks[t].label) {
            error(line_no, toks[t].col, "unexpected second label");
            continue;
        }
        auto op = detail::opcode_from_mnemonic(toks[t].text);
        if (!op) {
            error(line_no, toks[t].col, "unknown mnemonic '" + toks[t].text + "'");
            continue;
        }
        int arity = operand_arity(*op);
        code.push_back(static_cast<uint8_t>(*op));
        ++t;
        if (arity == 1) {
            if (t == toks.size()) {
                error(line_no, static_cast<int>(line.size() + 1),
                      std::string("missing operand for ") + mnemonic(*op));
                code.push_back(0);
            } else {
                const Tok& arg = toks[t];
                if (std::isdigit(static_cast<unsigned char>(arg.text[0]))) {
                    auto v = detail::parse_number(arg.text);
                    if (!v) {
                        error(line_no, arg.col, "malformed operand: " + arg.text);
                        v = 0;
                    } else if (*v > 255) {
                        error(line_no, arg.col, "operand out of byte range: " + arg.text);
                        v = 0;
                    }
                    code.push_back(static_cast<uint8_t>(*v));
                } else {
                    fixups.push_back({arg.text, static_cast<uint32_t>(code.size()), line_no, arg.col});
                    code.push_back(0);
                }
                ++t;
            }
        }
        if (t != toks.size()) error(line_no, toks[t].col, "trailing tokens on line");

        if (code.size() > 256) {
            error(line_no, 1, "program exceeds 256 bytes (operands are single bytes)");
            break;
        }
    }

    for (const Fixup& f : fixups) {
        auto it = labels.find(f.label);
        if (it == labels.end()) {
            error(f.line, f.col, "undefined label '" + f.label + "'");
        } else if (it->second > 255) {
            error(f.line, f.col, "label '" + f.label + "' out of operand range");
        } else {
            code[f.offset] = static_cast<uint8_t>(it->second);
        }
    }

    if (result.errors.empty()) result.program = Program::from_bytes(std::move(code), std::move(name));
    return result;
}

struct DisasmResult {
    std::optional<std::string> text;
    std::string error;
    bool ok() const { return text.has_value(); }
};

// One instruction per line, prefixed with its byte offset. The output parses
// back through assemble() to byte-identical code.
inline DisasmResult disassemble(const Program& program) {
    std::string out;
    uint32_t pc = 0;
    while (pc < program.size()) {
        auto ins = program.decode_at(pc);
        if (!ins) {
            return {std::nullopt,
                    "undecodable byte at instruction boundary " + std::to_string(pc)};
        }
        out += std::to_string(pc);
        out += ": ";
        out += mnemonic(ins->opcode);
        if (ins->operand >= 0) {
            out += ' ';
            out += std::to_string(ins->operand);
        }
        out += '\n';
        pc = ins->next_pc();
    }
    return {out, ""};
}

} // namespace ttvm
