/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on
// any failure.  Tolerances and time budgets are pinned in-line.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "bpa/harness.hpp"
#include "bpa/report.hpp"
#include "util.hpp"

using namespace bpa;

namespace {

int g_failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t0)
        .count();
}

void report(int num, const char* name, bool ok, double secs,
            const std::string& detail) {
    std::printf("criterion %d %-22s %s  (%.2fs)%s%s\n", num, name,
                ok ? "PASS" : "FAIL", secs, detail.empty() ? "" : "  ",
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

// Frozen expected output of the iteration tables for the first bundled
// example, byte for byte (tab-separated, one trailing newline each).
const char* kGoldenTables =
    "# table 0\n"
    "block\tref\tord\tnorm\tkind\trd\tdc\n"
    "[A0]{B,C}\t{B,C}\t1\t1\tP\t{B,C}\t-\n"
    "[A1]{B,C}\t{B,C}\t2\t1\tC\t-\t[A0]{B,C}\n"
    "# table 1\n"
    "block\tref\tord\tnorm\tkind\trd\tdc\n"
    "[A0]{}\t{}\t1\t1\tP\t{B,C}\t-\n"
    "[A1]{}\t{}\t6\t2\tP\t{B,C}\t-\n"
    "[B]{}\t{}\t2\t1\tP\t{B,C}\t-\n"
    "[C]{}\t{}\t3\t1\tP\t{B,C}\t-\n"
    "[A0]{B,C}\t{B,C}\t4\t1\tP\t{B,C}\t-\n"
    "[A1]{B,C}\t{B,C}\t5\t1\tC\t-\t[A0]{B,C}\n"
    "# table 2\n"
    "block\tref\tord\tnorm\tkind\trd\tdc\n"
    "[A0]{}\t{}\t1\t1\tP\t{}\t-\n"
    "[A1]{}\t{}\t6\t2\tP\t{}\t-\n"
    "[B]{}\t{}\t2\t1\tP\t{}\t-\n"
    "[C]{}\t{}\t3\t1\tP\t{B,C}\t-\n"
    "[A0]{B,C}\t{B,C}\t4\t1\tP\t{B,C}\t-\n"
    "[A1]{B,C}\t{B,C}\t5\t1\tC\t-\t[A0]{B,C}\n";
const char* kGoldenSummary = "iterations=3\tslices=2\tblocks=6\tmax_norm=2";

void criterion1() {
    auto t0 = std::chrono::steady_clock::now();
    System sys = fixture("ex1.bpa");
    Engine eng(sys);
    const IterationTrace& tr = eng.compute_fixpoint();
    std::string out;
    auto tables = iteration_tables(tr);
    for (std::size_t i = 0; i < tables.size(); ++i)
        out += "# table " + std::to_string(i) + "\n" + tables[i];
    bool ok = out == kGoldenTables && summary_line(tr) == kGoldenSummary;
    double secs = seconds_since(t0);
    report(1, "golden-tables", ok && secs < 1.0, secs,
           ok ? "exact table match, 3 constructions"
              : "table output deviates from the frozen golden");
}

void criterion2() {
    auto t0 = std::chrono::steady_clock::now();
    System sys = fixture("ex1.bpa");
    Engine eng(sys);
    auto p = [&](const char* s) { return sys.parse_process(s); };
    bool ok = eng.decide(0, p("A0.C"), p("A1.C")) &&
              !eng.decide(0, p("A0"), p("A1")) &&
              eng.decide(0, p("A0.A0.C"), p("A1.A0.C")) &&
              !eng.decide(0, p("A0.A0"), p("A1.A0"));
    const Base& fix = eng.fixpoint();
    BlockString d = fix.dcmp(0, p("A0.C"));
    ok = ok && d == fix.dcmp(0, p("A1.C")) &&
         fix.format_block_string(d) == "[A0]{B,C}[C]{}";
    double secs = seconds_since(t0);
    report(2, "example-decisions", ok && secs < 1.0, secs,
           "4 decisions + shared decomposition [A0]{B,C}[C]{}");
}

void criterion3() {
    auto t0 = std::chrono::steady_clock::now();
    System sys = fixture("ex1.bpa");
    Engine eng(sys);
    Process c = sys.parse_process("C");

    // All index vectors over {0,1} of length 0..4.
    std::vector<std::vector<int>> vecs{{}};
    for (int t = 1; t <= 4; ++t) {
        std::size_t start = vecs.size();
        std::vector<std::vector<int>> next;
        for (const auto& v : vecs)
            if (v.size() == static_cast<std::size_t>(t) - 1)
                for (int i : {0, 1}) {
                    auto w = v;
                    w.push_back(i);
                    next.push_back(w);
                }
        (void)start;
        vecs.insert(vecs.end(), next.begin(), next.end());
    }
    auto proc = [&](const std::vector<int>& v) {
        Process p;
        for (int i : v) p.syms.push_back(i);
        return p;
    };

    int suffixed = 0, plain = 0;
    bool ok = true;
    for (const auto& v : vecs)
        for (const auto& w : vecs) {
            // With the C suffix, any two vectors of the same length
            // are equivalent; without it, only identical ones are.
            if (v.size() == w.size()) {
                ++suffixed;
                if (!eng.decide(0, proc(v).concat(c), proc(w).concat(c)))
                    ok = false;
            }
            ++plain;
            if (eng.decide(0, proc(v), proc(w)) != (v == w)) ok = false;
        }
    double secs = seconds_since(t0);
    report(3, "index-families", ok && secs < 5.0, secs,
           std::to_string(suffixed) + " suffixed pairs equal, " +
               std::to_string(plain) + " unsuffixed pairs iff identical");
}

void criterion4() {
    auto t0 = std::chrono::steady_clock::now();
    System sys = fixture("ex2.bpa");
    Engine eng(sys);
    RelCache ocache(sys);
    Mask a1 = mask_bit(1);
    Process a0 = sys.parse_process("A0");
    bool ok = !eng.decide(a1, a0, Process{}) &&
              oracle_decide(ocache, a1, a0, Process{}) == Verdict::False;
    double secs = seconds_since(t0);
    report(4, "ground-preservation", ok, secs,
           "decide({A1}, A0, eps) = false, oracle agrees");
}

void criterion5() {
    auto t0 = std::chrono::steady_clock::now();
    FuzzOptions opt;
    opt.gen.num_constants = 6;
    opt.gen.num_rules = 12;
    opt.gen.seed = 42;
    opt.seed = 42;
    opt.trials = 500;
    opt.pairs_per_trial = 20;
    FuzzReport rep = fuzz_compare(opt);
    double secs = seconds_since(t0);
    double unknown_rate =
        rep.queries ? static_cast<double>(rep.unknowns) / rep.queries : 1.0;
    bool ok = rep.trials_run == 500 && rep.mismatches.empty() &&
              rep.errors.empty() && unknown_rate <= 0.10 && secs < 600.0;
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "%d queries, %d mismatches, %d errors, unknown rate %.1f%%",
                  rep.queries, static_cast<int>(rep.mismatches.size()),
                  static_cast<int>(rep.errors.size()), 100.0 * unknown_rate);
    report(5, "differential-gate", ok, secs, detail);
}

void criterion6() {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<std::string> sub;

    // Invariant suite (base validity per iteration, Id/Pr/Rd
    // monotonicity, refinement chain, norm agreement at the fixpoint,
    // norm laws on 100 trials x 10 sampled processes, oracle-side
    // computation lemma / monotonicity / congruence samples) over 100
    // generated systems; engine errors here would be cap breaches.
    FuzzOptions opt;
    opt.gen.num_constants = 6;
    opt.gen.num_rules = 12;
    opt.gen.seed = 42;
    opt.seed = 42;
    opt.trials = 100;
    opt.pairs_per_trial = 5;
    opt.check_properties = true;
    FuzzReport rep = fuzz_compare(opt);
    if (!rep.prop_failures.empty())
        sub.push_back("invariants: " + std::to_string(rep.prop_failures.size()) +
                      " failures, first: " + rep.prop_failures.front());
    if (!rep.errors.empty())
        sub.push_back("cap compliance: " + rep.errors.front());

    // Candidate uniqueness during expansion over the full 500-system
    // gate population: the trace records every level where more than
    // one candidate passed.
    int ambiguous = 0;
    std::string first_note;
    for (int t = 0; t < 500; ++t) {
        GenParams gp;
        gp.num_constants = 6;
        gp.num_rules = 12;
        gp.seed = 42 + static_cast<std::uint64_t>(t);
        System sys = generate_system(gp);
        Engine eng(sys);
        const IterationTrace& tr = eng.compute_fixpoint();
        for (const std::string& n : tr.notes)
            if (n.rfind("ambiguous expansion", 0) == 0) {
                ++ambiguous;
                if (first_note.empty())
                    first_note = "seed " + std::to_string(gp.seed) + ": " + n;
            }
    }
    if (ambiguous > 0)
        sub.push_back("candidate uniqueness: " + std::to_string(ambiguous) +
                      " ambiguous expansions in 500 systems (known "
                      "intermediate-iteration effect, resolved by the "
                      "silent-witness rule; verdicts unaffected — see the "
                      "differential gate); first: " + first_note);

    double secs = seconds_since(t0);
    report(6, "property-suites", sub.empty(), secs,
           sub.empty() ? "all sub-properties hold" : "");
    for (const std::string& s : sub) std::printf("    - %s\n", s.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    void (*crit[])() = {criterion1, criterion2, criterion3,
                        criterion4, criterion5, criterion6};
    if (argc > 1) {
        // Optional subset of criterion numbers, for development runs.
        for (int i = 1; i < argc; ++i) crit[std::atoi(argv[i]) - 1]();
        return g_failures ? 1 : 0;
    }
    for (auto f : crit) f();
    std::printf("%s (%d criteria failed)\n",
                g_failures ? "ACCEPTANCE: FAIL" : "ACCEPTANCE: PASS",
                g_failures);
    return g_failures ? 1 : 0;
}
