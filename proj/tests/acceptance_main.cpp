// Acceptance suite: one line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cstdio>
#include <random>
#include <set>
#include <vector>

#include "support/graphs.hpp"
#include "support/listings.hpp"
#include "support/program_gen.hpp"
#include "support/reference_interp.hpp"
#include "ttvm/vm.hpp"

using namespace ttvm;

namespace {

int failures = 0;

void report(int criterion, const char* label, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", criterion, label,
                detail.empty() ? "" : ": ", detail.c_str());
    if (!pass) ++failures;
}

TierPolicy eager(Mode mode) {
    TierPolicy p;
    p.mode = mode;
    p.t1_call_threshold = 1;
    p.t2_loop_threshold = 2;
    p.bridge_threshold = 2;
    return p;
}

Outcome run_mode(const Program& p, int64_t arg, Mode mode) {
    VmSession s(p, eager(mode));
    return run_program(s, Value::from_int(arg));
}

std::vector<std::vector<uint8_t>> random_suite(size_t count) {
    std::vector<std::vector<uint8_t>> out;
    out.reserve(count);
    for (uint64_t seed = 1; out.size() < count; ++seed) {
        testsupport::ProgramGen gen(seed);
        std::vector<uint8_t> bytes = gen.generate();
        if (Program::from_bytes(bytes).validate().ok()) out.push_back(std::move(bytes));
    }
    return out;
}

// --- 1: exact result equality across execution modes --------------------

void criterion_1(const std::vector<std::vector<uint8_t>>& suite) {
    const Mode modes[] = {Mode::InterpOnly, Mode::T1Only, Mode::T2Only, Mode::Annotated};
    size_t checked = 0;

    for (const auto* bytes :
         {&testsupport::kLoopBytes, &testsupport::kLoopabitBytes, &testsupport::kCallabitBytes}) {
        Program p = Program::from_bytes(*bytes);
        for (int64_t arg = 1; arg <= 100; ++arg) {
            Outcome base = run_mode(p, arg, Mode::InterpOnly);
            if (!base.is_done()) {
                report(1, "mode equivalence", false,
                       "reference program errored at arg " + std::to_string(arg));
                return;
            }
            for (Mode m : modes) {
                Outcome o = run_mode(p, arg, m);
                if (!o.is_done() || !(o.value == base.value)) {
                    report(1, "mode equivalence", false,
                           std::string("divergence under ") + mode_name(m) + " at arg " +
                               std::to_string(arg));
                    return;
                }
            }
            ++checked;
        }
    }

    for (const auto& bytes : suite) {
        Program p = Program::from_bytes(bytes);
        for (int64_t arg : {0, 5}) {
            refvm::RefOutcome expected = refvm::ref_run(bytes, arg);
            if (expected.kind != refvm::RefOutcome::Done) {
                report(1, "mode equivalence", false, "oracle rejected a generated program");
                return;
            }
            for (Mode m : modes) {
                Outcome o = run_mode(p, arg, m);
                if (!o.is_done() || o.value.as_int() != expected.value.v ||
                    !o.value.is_int()) {
                    report(1, "mode equivalence", false,
                           std::string("random-program divergence under ") + mode_name(m));
                    return;
                }
            }
            ++checked;
        }
    }
    report(1, "mode equivalence", true,
           std::to_string(checked) + " program/arg cells identical across interp/t1/t2/annotated");
}

// --- 2: stitching structure ----------------------------------------------

bool stitch_structure_ok(const Program& p, uint32_t entry, std::string& why) {
    TraverseInterner interner;
    TraceMethodResult r = trace_method(p, entry, interner);
    if (!r.ok()) {
        why = "trace aborted";
        return false;
    }
    StitchedCode code = stitch_trace(*r.trace);
    size_t marked = r.trace->marked_guard_count();
    if (code.segments.size() != marked + 1) {
        why = "segments != marked guards + 1";
        return false;
    }
    if (code.links.size() != marked) {
        why = "links are not a bijection";
        return false;
    }
    std::set<int> linked;
    for (const auto& [gid, seg] : code.links) {
        if (!linked.insert(seg).second) {
            why = "two guards share a bridge";
            return false;
        }
        if (seg == 0) {
            why = "body has an inbound link";
            return false;
        }
        if (code.segments[seg].entry_pc != code.guards[gid].resume_pc) {
            why = "bridge entry != guard resume";
            return false;
        }
    }
    return true;
}

void criterion_2(const std::vector<std::vector<uint8_t>>& suite) {
    std::string why;
    {
        Program loop = Program::from_bytes(testsupport::kLoopBytes);
        TraverseInterner in1;
        StitchedCode code = stitch_trace(*trace_method(loop, 0, in1).trace);
        if (code.segments.size() != 2) {
            report(2, "stitching structure", false, "loop: expected 1 body + 1 bridge");
            return;
        }
    }
    {
        Program loopabit = Program::from_bytes(testsupport::kLoopabitBytes);
        TraverseInterner in2;
        StitchedCode code = stitch_trace(*trace_method(loopabit, 0, in2).trace);
        if (code.segments.size() != 3) {
            report(2, "stitching structure", false, "loopabit: expected 1 body + 2 bridges");
            return;
        }
    }
    for (const auto& bytes : suite) {
        Program p = Program::from_bytes(bytes);
        if (!stitch_structure_ok(p, 0, why)) {
            report(2, "stitching structure", false, why);
            return;
        }
    }
    report(2, "stitching structure", true,
           "loop 1+1, loopabit 1+2; guard/bridge bijection and entry pcs hold on " +
               std::to_string(suite.size()) + " random programs");
}

// --- 3: CFG reconstruction oracle ----------------------------------------

bool cfg_iso_ok(const std::vector<uint8_t>& bytes, uint32_t entry, std::string& why) {
    Program p = Program::from_bytes(bytes);
    TraverseInterner interner;
    TraceMethodResult r = trace_method(p, entry, interner);
    if (!r.ok()) {
        why = "trace aborted";
        return false;
    }
    StitchedCode code = stitch_trace(*r.trace);
    testsupport::Graph got = testsupport::graph_from_stitched(code);
    testsupport::Graph want = testsupport::cfg_from_bytes(bytes, entry);
    if (!(got == want)) {
        why = "graph mismatch at entry " + std::to_string(entry) + " (" +
              std::to_string(got.nodes.size()) + "/" + std::to_string(want.nodes.size()) +
              " nodes, " + std::to_string(got.edges.size()) + "/" +
              std::to_string(want.edges.size()) + " edges)";
        return false;
    }
    return true;
}

void criterion_3(const std::vector<std::vector<uint8_t>>& suite) {
    std::string why;
    size_t methods = 0;
    // Every method of the reference programs (and the nested-branch sample).
    std::vector<std::pair<std::vector<uint8_t>, uint32_t>> cases = {
        {testsupport::kLoopBytes, 0},
        {testsupport::kLoopabitBytes, 0},
        {testsupport::kCallabitBytes, 0},
        {testsupport::kCallabitBytes, 16},
        {testsupport::load_sample("branches.tla").code(), 0},
    };
    for (const auto& [bytes, entry] : cases) {
        if (!cfg_iso_ok(bytes, entry, why)) {
            report(3, "CFG reconstruction", false, why);
            return;
        }
        ++methods;
    }
    for (const auto& bytes : suite) {
        if (!cfg_iso_ok(bytes, 0, why)) {
            report(3, "CFG reconstruction", false, why);
            return;
        }
        ++methods;
    }
    report(3, "CFG reconstruction", true,
           std::to_string(methods) + " compiled methods isomorphic to their decoded CFGs");
}

// --- 4: combined-tier compile footprint ----------------------------------

void criterion_4() {
    Program p = testsupport::load_sample("callabit_jit.tla");
    auto cold_ops = [&](CallKind toplevel) {
        TierPolicy policy; // default thresholds
        policy.mode = Mode::Annotated;
        policy.toplevel_kind = toplevel;
        VmSession s(p, policy);
        Outcome o = run_program(s, Value::from_int(500));
        if (!o.is_done()) return static_cast<uint64_t>(0);
        return s.metrics().total_trace_ops();
    };
    uint64_t combined = cold_ops(CallKind::Call);     // baseline main + traced callee
    uint64_t tracing_only = cold_ops(CallKind::CallJit); // everything traced
    bool pass = combined > 0 && tracing_only > 0 && combined < tracing_only &&
                (tracing_only - combined) * 100 >= 20 * tracing_only;
    double pct = tracing_only ? 100.0 * (tracing_only - combined) / tracing_only : 0.0;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "baseline+tracing records %llu ops vs %llu tracing-only (%.1f%% smaller, "
                  "gate: >=20%%)",
                  static_cast<unsigned long long>(combined),
                  static_cast<unsigned long long>(tracing_only), pct);
    report(4, "combined-tier trace footprint", pass, buf);
}

// --- 5: dispatch economy --------------------------------------------------

void criterion_5() {
    Program p = Program::from_bytes(testsupport::kLoopBytes);
    const int64_t arg = 1'000'000;
    using clock = std::chrono::steady_clock;

    auto events = [](const MetricsSink& m) { return m.total_dispatch_events(); };

    VmSession interp(p, [] {
        TierPolicy t;
        t.mode = Mode::InterpOnly;
        return t;
    }());
    auto t0 = clock::now();
    Outcome oi = run_program(interp, Value::from_int(arg));
    double interp_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    uint64_t interp_events = events(interp.metrics());
    uint64_t interp_decodes = interp.metrics().decode_count;

    // Tier 1: default entry threshold 2, so run twice to warm, measure run 3.
    VmSession t1(p, [] {
        TierPolicy t;
        t.mode = Mode::T1Only;
        return t;
    }());
    run_program(t1, Value::from_int(arg));
    run_program(t1, Value::from_int(arg));
    uint64_t d0 = t1.metrics().decode_count;
    uint64_t e0 = events(t1.metrics());
    t0 = clock::now();
    Outcome o1 = run_program(t1, Value::from_int(arg));
    double t1_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    uint64_t t1_decodes = t1.metrics().decode_count - d0;
    uint64_t t1_events = events(t1.metrics()) - e0;

    // Tier 2: one warmup run compiles the loop and (bridge threshold 1)
    // attaches the exit bridge; steady state from run 2.
    VmSession t2(p, [] {
        TierPolicy t;
        t.mode = Mode::T2Only;
        t.bridge_threshold = 1;
        return t;
    }());
    run_program(t2, Value::from_int(arg));
    uint64_t d2 = t2.metrics().decode_count;
    uint64_t e2 = events(t2.metrics());
    t0 = clock::now();
    Outcome o2 = run_program(t2, Value::from_int(arg));
    double t2_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    uint64_t t2_decodes = t2.metrics().decode_count - d2;
    uint64_t t2_events = events(t2.metrics()) - e2;

    bool results_ok = oi.is_done() && o1.is_done() && o2.is_done() &&
                      oi.value == o1.value && oi.value == o2.value;
    bool pass = results_ok && t1_decodes == 0 && t2_decodes == 0 &&
                t1_events < interp_events && t2_events < interp_events &&
                interp_decodes > 0;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "steady-state decodes t1=%llu t2=%llu (interp %llu); dispatch events "
                  "t1=%llu t2=%llu vs interp %llu",
                  static_cast<unsigned long long>(t1_decodes),
                  static_cast<unsigned long long>(t2_decodes),
                  static_cast<unsigned long long>(interp_decodes),
                  static_cast<unsigned long long>(t1_events),
                  static_cast<unsigned long long>(t2_events),
                  static_cast<unsigned long long>(interp_events));
    report(5, "dispatch economy at 1e6 iterations", pass, buf);
    std::printf("       wall-clock (informational, no asserted bound): interp %.1f ms, "
                "t1 %.1f ms (%.2fx), t2 %.1f ms (%.2fx)\n",
                interp_ms, t1_ms, interp_ms / t1_ms, t2_ms, interp_ms / t2_ms);
}

// --- 6: stitching pairing on the hand-built nested-branch trace -----------

void criterion_6() {
    // start A; guard g0 at B (resume 40 = D); guard g1 at C (resume 30 = F);
    // E jumps back to B, F jumps back to B, D returns.
    LinearTrace t;
    t.kind = LinearTrace::Kind::Tier1Method;
    t.entry_pc = 0;
    GuardFailure g0;
    g0.guard_id = 0;
    g0.origin_pc = 10;
    g0.resume_pc = 40;
    g0.marked = true;
    GuardFailure g1;
    g1.guard_id = 1;
    g1.origin_pc = 20;
    g1.resume_pc = 30;
    g1.marked = true;
    t.guards = {g0, g1};
    t.ops = {
        TraceOp::call_handler(0, Opcode::Dup, -1),  // A
        TraceOp::guard(10, 0),                      // B
        TraceOp::guard(20, 1),                      // C
        TraceOp::call_handler(25, Opcode::Sub, -1), // E
        TraceOp::emit_jump(26, 10),                 // emit_X: E -> B
        TraceOp::call_handler(30, Opcode::Add, -1), // F
        TraceOp::emit_jump(31, 10),                 // emit_Y: F -> B
        TraceOp::call_handler(40, Opcode::Pop, -1), // D
        TraceOp::emit_ret(41, 1, true),             // end
    };

    TokenMap map = create_token_map(t.ops);
    std::vector<StitchPair> pairs = do_trace_stitching(t, map);
    bool pop_order_ok = pairs.size() == 3 && pairs[0].guard_id && *pairs[0].guard_id == 1 &&
                        pairs[1].guard_id && *pairs[1].guard_id == 0 && !pairs[2].guard_id;

    StitchedCode code = link_segments(pairs, map, t);
    bool links_ok = code.segments.size() == 3 && code.links.at(1) == 1 &&
                    code.links.at(0) == 2 && code.segments[1].entry_pc == 30 &&
                    code.segments[2].entry_pc == 40;
    report(6, "stitching pairing on the nested-branch trace", pop_order_ok && links_ok,
           pop_order_ok ? "pop order last-pushed-first; body unlinked; g1->F-segment, "
                          "g0->D-segment"
                        : "pop order wrong");
}

// --- 7: traverse-stack interning -----------------------------------------

void criterion_7() {
    TraverseInterner interner;
    std::mt19937_64 rng(2024);
    std::map<std::pair<uint32_t, const TraverseStack*>, const TraverseStack*> seen;
    std::vector<const TraverseStack*> live{nullptr};
    const TraverseStack* cur = nullptr;
    size_t ops = 0;
    bool ok = true;

    while (ops < 10000) {
        bool push = t_is_empty(cur) || (rng() % 10) < 6;
        if (push) {
            uint32_t pc = static_cast<uint32_t>(rng() % 8);
            const TraverseStack* node = t_push(pc, cur, interner);
            auto key = std::make_pair(pc, cur);
            auto it = seen.find(key);
            if (it == seen.end())
                seen.emplace(key, node);
            else if (it->second != node)
                ok = false;
            // Re-push of the same key must be pointer-identical.
            if (t_push(pc, cur, interner) != node) ok = false;
            cur = node;
            live.push_back(cur);
        } else {
            auto [pc, rest] = t_pop(cur);
            (void)pc;
            cur = rest;
        }
        ++ops;
        if (!ok) break;
    }
    report(7, "traverse-stack interning", ok,
           ok ? std::to_string(ops) + " interleaved ops, " +
                    std::to_string(interner.node_count()) + " unique nodes, no duplicate keys"
              : "duplicate node allocated for an existing key");
}

// --- 8: deopt/bridge lifecycle --------------------------------------------

void criterion_8() {
    Program p = Program::from_bytes(testsupport::kLoopBytes);
    TierPolicy policy;
    policy.mode = Mode::T2Only;
    policy.t2_loop_threshold = 100;
    policy.bridge_threshold = 3;
    VmSession s(p, policy);

    bool ok = true;
    std::string why;
    for (int run = 1; run <= 10 && ok; ++run) {
        Outcome o = run_program(s, Value::from_int(300));
        if (!o.is_done() || !(o.value == Value::from_int(-10))) {
            ok = false;
            why = "wrong result on run " + std::to_string(run);
            break;
        }
        uint64_t expect = run <= 3 ? run : 3;
        if (s.metrics().deopt_count != expect) {
            ok = false;
            why = "run " + std::to_string(run) + ": deopts " +
                  std::to_string(s.metrics().deopt_count) + ", expected " +
                  std::to_string(expect);
        }
    }
    report(8, "deopt/bridge lifecycle (threshold 3)", ok,
           ok ? "exit guard deopted exactly 3 times, then stayed in compiled code" : why);
}

} // namespace

int main() {
    std::printf("acceptance suite\n");
    auto suite = random_suite(1000);
    criterion_1(suite);
    criterion_2(suite);
    criterion_3(suite);
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    if (failures == 0)
        std::printf("all criteria passed\n");
    else
        std::printf("%d criteria FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
