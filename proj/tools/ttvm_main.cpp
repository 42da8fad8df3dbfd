// ttvm: a two-tier tracing VM for a small stack bytecode.
//
//   run     execute a program and print its result
//   trace   dump the traces/compiled code a run produces
//   bench   stable + startup benchmark protocol, JSON/CSV reports
//   export  DOT export of a program's CFG or its stitched code
//   asm     assemble .tla text into .tlb bytecode
//   disasm  disassemble .tla/.tlb into listing text

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <CLI11.hpp>

#include "ttvm/vm.hpp"

namespace {

using namespace ttvm;

constexpr int kExitOk = 0;
constexpr int kExitProgramError = 1;
constexpr int kExitUsage = 2;

struct CommonOpts {
    std::string file;
    int64_t arg = 100;
    std::string mode_name;
    std::string toplevel_name = "call";
    uint64_t t1_threshold = 0;     // 0 = keep default
    uint64_t t2_threshold = 0;
    uint64_t bridge_threshold = 0;
    uint64_t fuel = 0;
};

void add_policy_flags(CLI::App* cmd, CommonOpts& o, bool with_arg = true) {
    if (with_arg) cmd->add_option("--arg", o.arg, "integer argument (initial stack)");
    cmd->add_option("--mode", o.mode_name,
                    "interp|t1|t2|annotated|auto (default: annotated, or $TTVM_MODE)");
    cmd->add_option("--toplevel", o.toplevel_name,
                    "annotated mode: regime of the top-level method (call|call_normal|call_jit)");
    cmd->add_option("--t1-threshold", o.t1_threshold, "method-entry hotness threshold");
    cmd->add_option("--t2-threshold", o.t2_threshold, "back-edge hotness threshold");
    cmd->add_option("--bridge-threshold", o.bridge_threshold,
                    "guard failures before a tier-2 bridge is traced");
    cmd->add_option("--fuel", o.fuel, "step budget per run");
}

std::optional<TierPolicy> make_policy(const CommonOpts& o, std::string& err) {
    TierPolicy p;
    std::string mode = o.mode_name;
    if (mode.empty()) {
        if (const char* env = std::getenv("TTVM_MODE")) mode = env;
    }
    if (!mode.empty()) {
        auto m = mode_from_name(mode);
        if (!m) {
            err = "unknown mode '" + mode + "'";
            return std::nullopt;
        }
        p.mode = *m;
    }
    auto k = call_kind_from_name(o.toplevel_name);
    if (!k) {
        err = "unknown toplevel kind '" + o.toplevel_name + "'";
        return std::nullopt;
    }
    p.toplevel_kind = *k;
    if (o.t1_threshold) p.t1_call_threshold = o.t1_threshold;
    if (o.t2_threshold) p.t2_loop_threshold = o.t2_threshold;
    if (o.bridge_threshold) p.bridge_threshold = o.bridge_threshold;
    if (o.fuel) p.fuel = o.fuel;
    return p;
}

int write_out(const std::string& path, const std::string& data) {
    if (path.empty() || path == "-") {
        std::cout << data;
        return kExitOk;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "cannot write " << path << "\n";
        return kExitUsage;
    }
    out << data;
    return kExitOk;
}

int cmd_run(const CommonOpts& o) {
    std::string err;
    auto policy = make_policy(o, err);
    if (!policy) {
        std::cerr << err << "\n";
        return kExitUsage;
    }
    LoadResult lr = load_program(o.file);
    if (!lr.ok()) {
        std::cerr << lr.error;
        return kExitUsage;
    }
    VmSession session(*lr.program, *policy);
    Outcome out = run_program(session, Value::from_int(o.arg));
    if (out.is_error()) {
        std::cerr << "error: " << out.error.message() << "\n";
        return kExitProgramError;
    }
    std::cout << out.value.to_string() << "\n";
    return kExitOk;
}

int cmd_trace(const CommonOpts& o, const std::string& format, const std::string& stage,
              const std::string& out_path) {
    std::string err;
    auto policy = make_policy(o, err);
    if (!policy) {
        std::cerr << err << "\n";
        return kExitUsage;
    }
    // Dump tool defaults: compile eagerly unless thresholds were given.
    if (!o.t1_threshold) policy->t1_call_threshold = 1;
    if (!o.t2_threshold) policy->t2_loop_threshold = 2;
    if (!o.bridge_threshold) policy->bridge_threshold = 2;
    policy->keep_traces = true;
    if (policy->mode == Mode::Annotated && o.mode_name.empty() && !std::getenv("TTVM_MODE"))
        policy->mode = Mode::T1Only;

    LoadResult lr = load_program(o.file);
    if (!lr.ok()) {
        std::cerr << lr.error;
        return kExitUsage;
    }
    VmSession session(*lr.program, *policy);
    Outcome out = run_program(session, Value::from_int(o.arg));
    if (out.is_error()) {
        std::cerr << "error: " << out.error.message() << "\n";
        return kExitProgramError;
    }
    if (session.stored_traces().empty()) {
        std::cerr << "nothing was compiled under mode " << mode_name(policy->mode)
                  << " (thresholds never crossed?)\n";
        return kExitProgramError;
    }

    std::string text;
    if (stage == "linear") {
        if (format == "json") {
            json arr = json::array();
            for (const StoredTrace& st : session.stored_traces())
                arr.push_back(linear_trace_to_json(st.trace));
            text = arr.dump(2) + "\n";
        } else if (format == "dot") {
            std::cerr << "dot output is only defined for --stage stitched\n";
            return kExitUsage;
        } else {
            for (const StoredTrace& st : session.stored_traces())
                text += linear_trace_to_text(st.trace) + "\n";
        }
    } else { // stitched
        json arr = json::array();
        for (const auto& [pc, code] : session.method_cache()) {
            if (format == "json")
                arr.push_back(stitched_to_json(*code));
            else if (format == "dot")
                text += stitched_to_dot(*code, o.file + " @" + std::to_string(pc));
            else
                text += stitched_to_text(*code) + "\n";
        }
        for (const auto& [pc, code] : session.loop_cache()) {
            if (format == "json") {
                json j;
                j["entry_pc"] = code->header_pc;
                j["loop"] = linear_trace_to_json(code->trace);
                json bridges = json::array();
                for (const auto& b : code->bridges) bridges.push_back(linear_trace_to_json(b));
                j["bridges"] = bridges;
                arr.push_back(j);
            } else if (format == "dot") {
                text += loop_code_to_dot(*code, o.file + " @" + std::to_string(pc));
            } else {
                text += linear_trace_to_text(code->trace);
                for (const auto& b : code->bridges) text += linear_trace_to_text(b);
                text += "\n";
            }
        }
        if (format == "json") text = arr.dump(2) + "\n";
        if (text.empty()) {
            std::cerr << "nothing was compiled under mode " << mode_name(policy->mode) << "\n";
            return kExitProgramError;
        }
    }
    return write_out(out_path, text);
}

int cmd_export(const CommonOpts& o, const std::string& what, const std::string& out_path) {
    LoadResult lr = load_program(o.file);
    if (!lr.ok()) {
        std::cerr << lr.error;
        return kExitUsage;
    }
    if (what == "cfg") return write_out(out_path, cfg_to_dot(*lr.program, o.file));
    return cmd_trace(o, "dot", "stitched", out_path);
}

int cmd_asm(const std::string& in_path, const std::string& out_path) {
    LoadResult lr = load_program(in_path);
    if (!lr.ok()) {
        std::cerr << lr.error;
        return kExitUsage;
    }
    const auto& code = lr.program->code();
    std::string bytes(code.begin(), code.end());
    std::string out = out_path;
    if (out.empty()) out = std::filesystem::path(in_path).replace_extension(".tlb").string();
    return write_out(out, bytes);
}

int cmd_disasm(const std::string& in_path) {
    LoadResult lr = load_program(in_path);
    if (!lr.ok()) {
        std::cerr << lr.error;
        return kExitUsage;
    }
    DisasmResult d = disassemble(*lr.program);
    if (!d.ok()) {
        std::cerr << d.error << "\n";
        return kExitProgramError;
    }
    std::cout << *d.text;
    return kExitOk;
}

// Measure one cold run by spawning this executable.
double spawn_once(const std::string& self, const BenchCellSpec& spec, const TierPolicy& base,
                  const std::string& program_path) {
    std::vector<std::string> args = {
        self,
        "run",
        program_path,
        "--arg",
        std::to_string(spec.arg),
        "--mode",
        mode_name(spec.mode),
        "--toplevel",
        spec.toplevel == CallKind::Call ? "call"
        : spec.toplevel == CallKind::CallJit ? "call_jit"
                                             : "call_normal",
        "--t1-threshold",
        std::to_string(base.t1_call_threshold),
        "--t2-threshold",
        std::to_string(base.t2_loop_threshold),
        "--bridge-threshold",
        std::to_string(base.bridge_threshold),
    };
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);

    auto t0 = std::chrono::steady_clock::now();
    pid_t pid = fork();
    if (pid == 0) {
        int devnull = open("/dev/null", O_WRONLY);
        if (devnull >= 0) {
            dup2(devnull, 1);
            dup2(devnull, 2);
        }
        execv(self.c_str(), argv.data());
        _exit(127);
    }
    int status = 0;
    waitpid(pid, &status, 0);
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

int cmd_bench(const CommonOpts& o, const std::vector<std::string>& programs,
              const std::string& suite_path, const std::string& modes_csv, int iterations,
              int startup_runs, const std::string& out_format, const std::string& out_path,
              bool spawn, const std::string& self_exe) {
    std::string err;
    auto policy = make_policy(o, err);
    if (!policy) {
        std::cerr << err << "\n";
        return kExitUsage;
    }

    std::vector<BenchCellSpec> specs;
    std::map<std::string, std::string> program_paths; // name -> path (for --spawn)

    auto add_spec = [&](const std::string& name, const std::string& path, int64_t arg,
                        Mode mode, CallKind toplevel) -> bool {
        LoadResult lr = load_program(path);
        if (!lr.ok()) {
            std::cerr << lr.error;
            return false;
        }
        BenchCellSpec spec;
        spec.name = name.empty() ? std::filesystem::path(path).stem().string() : name;
        spec.program_name = std::filesystem::path(path).filename().string();
        spec.program = *lr.program;
        spec.arg = arg;
        spec.mode = mode;
        spec.toplevel = toplevel;
        specs.push_back(std::move(spec));
        program_paths[specs.back().name + "/" + mode_name(mode)] = path;
        return true;
    };

    if (!suite_path.empty()) {
        std::ifstream in(suite_path);
        if (!in) {
            std::cerr << "cannot open suite " << suite_path << "\n";
            return kExitUsage;
        }
        json suite = json::parse(in, nullptr, false);
        if (suite.is_discarded() || !suite.is_array()) {
            std::cerr << "suite must be a JSON array\n";
            return kExitUsage;
        }
        auto base_dir = std::filesystem::path(suite_path).parent_path();
        for (const auto& entry : suite) {
            std::string prog = entry.value("program", "");
            std::string path = (base_dir / prog).string();
            int64_t arg = entry.value("arg", o.arg);
            auto toplevel = call_kind_from_name(entry.value("toplevel", "call"));
            if (!toplevel) {
                std::cerr << "bad toplevel in suite entry\n";
                return kExitUsage;
            }
            std::vector<std::string> mode_names;
            if (entry.contains("modes"))
                for (const auto& m : entry["modes"]) mode_names.push_back(m.get<std::string>());
            else
                mode_names.push_back(entry.value("mode", "interp"));
            for (const std::string& mn : mode_names) {
                auto m = mode_from_name(mn);
                if (!m) {
                    std::cerr << "unknown mode '" << mn << "' in suite\n";
                    return kExitUsage;
                }
                std::string name = entry.value("name", "");
                if (mode_names.size() > 1) name += name.empty() ? mn : "_" + mn;
                if (!add_spec(name, path, arg, *m, *toplevel)) return kExitUsage;
            }
        }
    }

    std::vector<Mode> modes;
    {
        std::string csv = modes_csv;
        size_t start = 0;
        while (start < csv.size()) {
            size_t comma = csv.find(',', start);
            std::string tok = csv.substr(start, comma == std::string::npos ? std::string::npos
                                                                           : comma - start);
            start = comma == std::string::npos ? csv.size() : comma + 1;
            if (tok.empty()) continue;
            auto m = mode_from_name(tok);
            if (!m) {
                std::cerr << "unknown mode '" << tok << "'\n";
                return kExitUsage;
            }
            modes.push_back(*m);
        }
    }
    for (const std::string& path : programs)
        for (Mode m : modes)
            if (!add_spec("", path, o.arg, m, policy->toplevel_kind)) return kExitUsage;

    if (specs.empty()) {
        std::cerr << "nothing to benchmark: pass programs or --suite\n";
        return kExitUsage;
    }

    BenchConfig cfg;
    cfg.stable_iterations = iterations;
    cfg.startup_runs = startup_runs;
    cfg.base_policy = *policy;
    if (spawn) {
        cfg.spawn_runner = [&](const BenchCellSpec& spec) {
            auto it = program_paths.find(spec.name + "/" + mode_name(spec.mode));
            return spawn_once(self_exe, spec, cfg.base_policy,
                              it == program_paths.end() ? spec.program_name : it->second);
        };
    }

    BenchReport report = run_bench(cfg, specs);
    std::string text = out_format == "csv" ? bench_report_to_csv(report)
                                           : bench_report_to_json(report).dump(2) + "\n";
    return write_out(out_path, text);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-tier tracing VM for .tla stack bytecode"};
    app.require_subcommand(1);

    CommonOpts run_o, trace_o, export_o, bench_o;

    auto* run_cmd = app.add_subcommand("run", "execute a program and print the result");
    run_cmd->add_option("file", run_o.file, "program (.tla or .tlb)")->required();
    add_policy_flags(run_cmd, run_o);

    auto* trace_cmd = app.add_subcommand("trace", "dump recorded traces or compiled code");
    std::string trace_format = "text", trace_stage = "stitched", trace_out;
    trace_cmd->add_option("file", trace_o.file, "program (.tla or .tlb)")->required();
    add_policy_flags(trace_cmd, trace_o);
    trace_cmd->add_option("--format", trace_format, "text|json|dot");
    trace_cmd->add_option("--stage", trace_stage, "linear|stitched");
    trace_cmd->add_option("--out", trace_out, "output file (default stdout)");

    auto* export_cmd = app.add_subcommand("export", "DOT export of the CFG or stitched code");
    std::string export_what = "cfg", export_format = "dot", export_out;
    export_cmd->add_option("file", export_o.file, "program (.tla or .tlb)")->required();
    add_policy_flags(export_cmd, export_o);
    export_cmd->add_option("--what", export_what, "cfg|stitched");
    export_cmd->add_option("--format", export_format, "dot (only format)");
    export_cmd->add_option("--out", export_out, "output file (default stdout)");

    auto* bench_cmd = app.add_subcommand("bench", "run the benchmark protocol");
    std::vector<std::string> bench_programs;
    std::string bench_suite, bench_modes = "interp,t1,t2", bench_format = "json", bench_out;
    int bench_iters = 101, bench_startup = 100;
    bool bench_spawn = false;
    bench_cmd->add_option("programs", bench_programs, "programs to benchmark");
    bench_cmd->add_option("--suite", bench_suite, "suite JSON file");
    bench_cmd->add_option("--modes", bench_modes, "comma-separated modes for positional programs");
    bench_cmd->add_option("--iterations", bench_iters, "stable iterations incl. discarded first");
    bench_cmd->add_option("--startup-runs", bench_startup, "fresh-session runs");
    bench_cmd->add_option("--out", bench_format, "json|csv");
    bench_cmd->add_option("--out-file", bench_out, "output file (default stdout)");
    bench_cmd->add_flag("--spawn", bench_spawn, "spawn real processes for the startup protocol");
    add_policy_flags(bench_cmd, bench_o);

    auto* asm_cmd = app.add_subcommand("asm", "assemble .tla into .tlb");
    std::string asm_in, asm_out;
    asm_cmd->add_option("file", asm_in, "input .tla")->required();
    asm_cmd->add_option("-o,--out", asm_out, "output .tlb (default: input with .tlb)");

    auto* disasm_cmd = app.add_subcommand("disasm", "disassemble .tla/.tlb to listing text");
    std::string disasm_in;
    disasm_cmd->add_option("file", disasm_in, "input program")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    if (run_cmd->parsed()) return cmd_run(run_o);
    if (trace_cmd->parsed()) return cmd_trace(trace_o, trace_format, trace_stage, trace_out);
    if (export_cmd->parsed()) return cmd_export(export_o, export_what, export_out);
    if (bench_cmd->parsed())
        return cmd_bench(bench_o, bench_programs, bench_suite, bench_modes, bench_iters,
                         bench_startup, bench_format, bench_out, bench_spawn, argv[0]);
    if (asm_cmd->parsed()) return cmd_asm(asm_in, asm_out);
    if (disasm_cmd->parsed()) return cmd_disasm(disasm_in);
    return kExitUsage;
}
