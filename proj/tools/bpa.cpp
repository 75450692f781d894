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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "bpa/harness.hpp"
#include "bpa/norms.hpp"
#include "bpa/oracle.hpp"
#include "bpa/refine.hpp"
#include "bpa/report.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw bpa::Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bpa::System load(const std::string& path) {
    bpa::System sys = bpa::System::parse(read_file(path));
    for (const std::string& w : sys.warnings())
        std::cerr << "warning: " << w << "\n";
    return sys;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"normed BPA branching-bisimilarity checker"};
    app.require_subcommand(1);

    std::string file, p_str, q_str, ref_str, out_path, dump_dir, repro_dir;
    std::string id_mode = "figure";
    std::size_t max_states = 2000, max_len = 12;
    std::uint64_t seed = 0;
    int consts = 4, rules = 8, trials = 100, pairs = 20, max_rhs = 3;
    double ground_frac = 0.5, silent_frac = 0.3;
    bool props = false;

    auto* cmd_norms = app.add_subcommand("norms", "per-constant norm table");
    cmd_norms->add_option("file", file)->required();

    auto* cmd_check = app.add_subcommand("check", "decide p ~_R q");
    cmd_check->add_option("file", file)->required();
    cmd_check->add_option("p", p_str)->required();
    cmd_check->add_option("q", q_str)->required();
    cmd_check->add_option("--ref", ref_str, "reference set, e.g. B,C");
    cmd_check->add_option("--id-mode", id_mode)
        ->check(CLI::IsMember({"figure", "candidate"}));

    auto* cmd_base = app.add_subcommand("base", "iteration tables");
    cmd_base->add_option("file", file)->required();
    cmd_base->add_option("--dump-iterations", dump_dir);

    auto* cmd_oracle = app.add_subcommand("oracle", "brute-force referee");
    cmd_oracle->add_option("file", file)->required();
    cmd_oracle->add_option("p", p_str)->required();
    cmd_oracle->add_option("q", q_str)->required();
    cmd_oracle->add_option("--ref", ref_str);
    cmd_oracle->add_option("--max-states", max_states);
    cmd_oracle->add_option("--max-len", max_len);

    auto* cmd_gen = app.add_subcommand("gen", "random normed system");
    cmd_gen->add_option("--seed", seed);
    cmd_gen->add_option("--consts", consts);
    cmd_gen->add_option("--rules", rules);
    cmd_gen->add_option("--max-rhs", max_rhs);
    cmd_gen->add_option("--ground-frac", ground_frac);
    cmd_gen->add_option("--silent-frac", silent_frac);
    cmd_gen->add_option("-o,--out", out_path);

    auto* cmd_fuzz = app.add_subcommand("fuzz", "engine vs oracle");
    cmd_fuzz->add_option("--seed", seed);
    cmd_fuzz->add_option("--trials", trials);
    cmd_fuzz->add_option("--pairs", pairs);
    cmd_fuzz->add_option("--consts", consts);
    cmd_fuzz->add_option("--rules", rules);
    cmd_fuzz->add_option("--max-states", max_states);
    cmd_fuzz->add_option("--max-len", max_len);
    cmd_fuzz->add_option("--repro-dir", repro_dir);
    cmd_fuzz->add_flag("--props", props, "run the invariant suites too");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_norms->parsed()) {
            bpa::System sys = load(file);
            bpa::NormTable nt = bpa::validate_normed(sys);
            std::cout << "constant\tstrong\tweak\n";
            for (int c = 0; c < sys.num_constants(); ++c)
                std::cout << sys.constant_name(c) << "\t"
                          << bpa::nat_str(nt.strong[c]) << "\t"
                          << bpa::nat_str(nt.weak[c]) << "\n";
            return 0;
        }

        if (cmd_check->parsed()) {
            bpa::System sys = load(file);
            bpa::EngineOptions opt = bpa::EngineOptions::from_env();
            if (id_mode == "candidate") opt.id_mode = bpa::IdMode::Candidate;
            bpa::Engine eng(sys, opt);
            bpa::Process p = sys.parse_process(p_str);
            bpa::Process q = sys.parse_process(q_str);
            bpa::Mask r = sys.parse_ref_set(ref_str);
            bool eq = eng.decide(r, p, q);
            bpa::Mask rq = bpa::qualify(sys, r);
            const bpa::Base& fix = eng.fixpoint();
            std::cout << (eq ? "EQUIV" : "NONEQUIV") << "\n";
            std::cout << "dcmp(" << sys.format_process(p) << ") = "
                      << fix.format_block_string(fix.dcmp(rq, p)) << "\n";
            std::cout << "dcmp(" << sys.format_process(q) << ") = "
                      << fix.format_block_string(fix.dcmp(rq, q)) << "\n";
            return eq ? 0 : 1;
        }

        if (cmd_base->parsed()) {
            bpa::System sys = load(file);
            bpa::Engine eng(sys, bpa::EngineOptions::from_env());
            const bpa::IterationTrace& tr = eng.compute_fixpoint();
            auto tables = bpa::iteration_tables(tr);
            for (std::size_t i = 0; i < tables.size(); ++i)
                std::cout << "# table " << i << "\n" << tables[i];
            std::cout << bpa::summary_line(tr) << "\n";
            if (!dump_dir.empty()) {
                std::filesystem::create_directories(dump_dir);
                for (std::size_t i = 0; i < tables.size(); ++i) {
                    std::ofstream out(dump_dir + "/iter" + std::to_string(i) +
                                      ".tsv");
                    out << tables[i];
                }
            }
            return 0;
        }

        if (cmd_oracle->parsed()) {
            bpa::System sys = load(file);
            bpa::RelCache cache(sys);
            bpa::Process p = sys.parse_process(p_str);
            bpa::Process q = sys.parse_process(q_str);
            bpa::Mask r = bpa::qualify(sys, sys.parse_ref_set(ref_str));
            bpa::OracleCaps caps{max_states, max_len};
            bpa::Verdict v = bpa::oracle_decide(cache, r, p, q, caps);
            if (v == bpa::Verdict::True) std::cout << "EQUIV\n";
            if (v == bpa::Verdict::False) std::cout << "NONEQUIV\n";
            if (v == bpa::Verdict::Unknown) std::cout << "UNKNOWN\n";
            return v == bpa::Verdict::False ? 1 : 0;
        }

        if (cmd_gen->parsed()) {
            bpa::GenParams gp{consts, rules, max_rhs, ground_frac,
                              silent_frac, seed};
            bpa::System sys = bpa::generate_system(gp);
            if (out_path.empty()) {
                std::cout << sys.print();
            } else {
                std::ofstream out(out_path);
                out << sys.print();
            }
            return 0;
        }

        if (cmd_fuzz->parsed()) {
            bpa::FuzzOptions fo;
            fo.gen = bpa::GenParams{consts, rules, 3, ground_frac,
                                    silent_frac, seed};
            fo.trials = trials;
            fo.pairs_per_trial = pairs;
            fo.seed = seed;
            fo.caps = bpa::OracleCaps{max_states, max_len};
            fo.engine = bpa::EngineOptions::from_env();
            fo.check_properties = props;
            fo.repro_dir = repro_dir;
            bpa::FuzzReport rep = bpa::fuzz_compare(fo);
            std::cout << "trials=" << rep.trials_run
                      << "\tqueries=" << rep.queries
                      << "\tagreements=" << rep.agreements
                      << "\tunknowns=" << rep.unknowns
                      << "\tmismatches=" << rep.mismatches.size()
                      << "\terrors=" << rep.errors.size() << "\n";
            for (auto& m : rep.mismatches) std::cout << "MISMATCH " << m << "\n";
            for (auto& e : rep.errors) std::cerr << "error: " << e << "\n";
            for (auto& f : rep.prop_failures)
                std::cout << "PROPERTY " << f << "\n";
            return rep.clean() ? 0 : 3;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
