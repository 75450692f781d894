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

#include "bpa/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace bpa {

namespace {

// All randomness goes through these helpers so runs are byte-identical
// across standard libraries.
int rnd_below(std::mt19937_64& rng, int k) {
    return k <= 1 ? 0 : static_cast<int>(rng() % static_cast<unsigned>(k));
}
bool rnd_prob(std::mt19937_64& rng, double p) {
    return static_cast<double>(rng() % 1000000) < p * 1000000.0;
}
template <typename T>
void rnd_shuffle(std::mt19937_64& rng, std::vector<T>& v) {
    for (int i = static_cast<int>(v.size()) - 1; i > 0; --i)
        std::swap(v[i], v[rnd_below(rng, i + 1)]);
}

struct RawRule {
    int lhs;
    std::string act;
    std::vector<int> rhs;
    bool operator==(const RawRule&) const = default;
};

}  // namespace

System generate_system(const GenParams& params) {
    int n = params.num_constants;
    if (n < 1 || n > kMaxConstants)
        throw InfeasibleParamsError("constant count out of range");
    if (params.num_rules < n)
        throw InfeasibleParamsError("need at least one rule per constant");
    if (params.max_rhs_len < 0)
        throw InfeasibleParamsError("negative RHS length");
    int g = static_cast<int>(std::lround(params.ground_frac * n));
    g = std::clamp(g, 0, n);
    if (g > 0 && params.silent_frac <= 0.0)
        throw InfeasibleParamsError(
            "ground constants require silent rules (silent-frac 0)");

    std::mt19937_64 rng(params.seed);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    rnd_shuffle(rng, order);
    std::vector<bool> is_ground(n, false);
    for (int i = 0; i < g; ++i) is_ground[order[i]] = true;

    const std::vector<std::string> visible = {"a", "b"};
    std::vector<RawRule> rules;
    auto have = [&](const RawRule& r) {
        return std::find(rules.begin(), rules.end(), r) != rules.end();
    };

    // One norm-reducing rule per constant, over smaller indices only,
    // so normedness (and groundness of the designated set) is forced.
    int short_cap = std::min(2, params.max_rhs_len);
    for (int i = 0; i < n; ++i) {
        RawRule r;
        r.lhs = i;
        std::vector<int> pool;
        for (int j = 0; j < i; ++j)
            if (!is_ground[i] || is_ground[j]) pool.push_back(j);
        int len = pool.empty() ? 0 : rnd_below(rng, short_cap + 1);
        for (int k = 0; k < len; ++k)
            r.rhs.push_back(pool[rnd_below(rng, static_cast<int>(pool.size()))]);
        r.act = is_ground[i] ? "tau"
                             : visible[rnd_below(rng, static_cast<int>(
                                                          visible.size()))];
        rules.push_back(std::move(r));
    }

    std::vector<int> non_ground;
    for (int i = 0; i < n; ++i)
        if (!is_ground[i]) non_ground.push_back(i);

    int extra = params.num_rules - n;
    for (int e = 0; e < extra; ++e) {
        bool placed = false;
        for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
            RawRule r;
            r.lhs = rnd_below(rng, n);
            bool silent = rnd_prob(rng, params.silent_frac);
            int len = rnd_below(rng, params.max_rhs_len + 1);
            for (int k = 0; k < len; ++k) {
                // Bias toward smaller indices to keep the state space
                // from expanding (the oracle needs finite fragments).
                if (r.lhs > 0 && rnd_prob(rng, 0.7))
                    r.rhs.push_back(rnd_below(rng, r.lhs));
                else
                    r.rhs.push_back(rnd_below(rng, n));
            }
            if (silent && !is_ground[r.lhs]) {
                // A silent rule must not accidentally ground its LHS.
                bool has_non_ground = false;
                for (int c : r.rhs) has_non_ground |= !is_ground[c];
                if (!has_non_ground) {
                    int c = non_ground[rnd_below(
                        rng, static_cast<int>(non_ground.size()))];
                    r.rhs.insert(
                        r.rhs.begin() +
                            rnd_below(rng, static_cast<int>(r.rhs.size()) + 1),
                        c);
                }
            }
            r.act = silent ? "tau"
                           : visible[rnd_below(rng, static_cast<int>(
                                                        visible.size()))];
            if (have(r)) continue;
            rules.push_back(std::move(r));
            placed = true;
        }
        if (!placed)
            throw InfeasibleParamsError("cannot place distinct rule " +
                                        std::to_string(n + e));
    }

    std::ostringstream text;
    text << "constants:";
    for (int i = 0; i < n; ++i) text << " X" << i;
    text << "\nrules:\n";
    for (const RawRule& r : rules) {
        text << "X" << r.lhs << " -" << r.act << "-> ";
        if (r.rhs.empty()) {
            text << "eps";
        } else {
            for (std::size_t k = 0; k < r.rhs.size(); ++k)
                text << (k ? "." : "") << "X" << r.rhs[k];
        }
        text << "\n";
    }

    System sys = System::parse(text.str());
    Mask want = 0;
    for (int i = 0; i < n; ++i)
        if (is_ground[i]) want |= mask_bit(i);
    if (sys.ground_mask() != want)
        throw Error("internal: generated ground set drifted from target");
    validate_normed(sys);
    return sys;
}

namespace {

Process sample_process(std::mt19937_64& rng, int n, int max_len) {
    Process p;
    int len = rnd_below(rng, max_len + 1);
    for (int k = 0; k < len; ++k) p.syms.push_back(rnd_below(rng, n));
    return p;
}

Mask sample_ref_set(std::mt19937_64& rng, const System& sys, int which) {
    Mask cg = sys.ground_mask();
    switch (which % 4) {
        case 0: return 0;
        case 1: return cg;
        case 2: {  // singleton
            std::vector<int> gs;
            for (int c = 0; c < sys.num_constants(); ++c)
                if (mask_has(cg, c)) gs.push_back(c);
            if (gs.empty()) return 0;
            return mask_bit(gs[rnd_below(rng, static_cast<int>(gs.size()))]);
        }
        default: {  // random subset
            Mask m = 0;
            for (int c = 0; c < sys.num_constants(); ++c)
                if (mask_has(cg, c) && rnd_prob(rng, 0.5)) m |= mask_bit(c);
            return m;
        }
    }
}

std::pair<Process, Process> sample_pair(std::mt19937_64& rng, int n,
                                        int which) {
    switch (which % 3) {
        case 0:  // plain constant pair
            return {Process::single(rnd_below(rng, n)),
                    Process::single(rnd_below(rng, n))};
        case 1:  // short products
            return {sample_process(rng, n, 4), sample_process(rng, n, 4)};
        default: {  // distinct heads over a shared suffix
            Process suffix = sample_process(rng, n, 2);
            Process p = sample_process(rng, n, 2).concat(suffix);
            Process q = sample_process(rng, n, 2).concat(suffix);
            return {p, q};
        }
    }
}

std::string verdict_str(Verdict v) {
    switch (v) {
        case Verdict::True: return "EQUIV";
        case Verdict::False: return "NONEQUIV";
        default: return "UNKNOWN";
    }
}

}  // namespace

std::vector<std::string> check_engine_properties(Engine& engine,
                                                 std::uint64_t sample_seed) {
    std::vector<std::string> bad;
    const IterationTrace& tr = engine.compute_fixpoint();
    const System& sys = engine.system();
    int n = sys.num_constants();

    for (std::size_t i = 0; i < tr.bases.size(); ++i)
        for (const std::string& v : tr.bases[i].validate())
            bad.push_back("base " + std::to_string(i) + ": " + v);

    if (!tr.converged) bad.push_back("fixpoint loop did not converge");

    auto primes_of = [](const Base& b, Mask r) {
        std::set<int> out;
        for (const auto& [rep, e] : b.slices().at(r).blocks)
            if (e.kind == BlockKind::Prime) out.insert(rep);
        return out;
    };

    for (std::size_t i = 0; i + 1 < tr.bases.size(); ++i) {
        const Base& d = tr.bases[i];
        const Base& b = tr.bases[i + 1];
        for (Mask r : engine.qualified_sets()) {
            Mask idd = d.id_of(r), idb = b.id_of(r);
            if (!mask_subset(idb, idd))
                bad.push_back("Id grew between iterations at " +
                              sys.format_ref_set(r));
            if (idb != idd || idb != r) continue;
            auto pd = primes_of(d, r);
            auto pb = primes_of(b, r);
            if (!std::includes(pb.begin(), pb.end(), pd.begin(), pd.end()))
                bad.push_back("prime set shrank with equal Id at " +
                              sys.format_ref_set(r));
            if (pd != pb) continue;
            for (int rep : pb) {
                Mask rdd = d.slices().at(r).blocks.at(rep).rd;
                Mask rdb = b.slices().at(r).blocks.at(rep).rd;
                if (!mask_subset(rdb, rdd))
                    bad.push_back("Rd grew with equal Id/Pr at " +
                                  sys.format_ref_set(r));
            }
        }
        // Refinement chain: the new equality is contained in the old.
        std::mt19937_64 rng(sample_seed ^ (0x517cc1b7u + i));
        for (int k = 0; k < 30; ++k) {
            Mask r = engine.qualified_sets()[rnd_below(
                rng, static_cast<int>(engine.qualified_sets().size()))];
            Process p = sample_process(rng, n, 3);
            Process q = sample_process(rng, n, 3);
            if (b.b_equal(r, p, q) && !d.b_equal(r, p, q))
                bad.push_back("refinement chain violated at " +
                              sys.format_ref_set(r));
        }
    }

    const Base& fix = tr.bases.back();
    for (const auto& [r, sl] : fix.slices())
        for (const auto& [rep, e] : sl.blocks) {
            if (!e.norm_set) {
                bad.push_back("untreated block on the fixpoint base");
                continue;
            }
            if (fix.semantic_norm(r, Process::single(rep)) != e.norm)
                bad.push_back("stored block norm differs from recomputed "
                              "semantic norm at " +
                              fix.format_block(BlockKey{r, rep}));
        }
    return bad;
}

std::vector<std::string> check_norm_laws(Engine& engine, int samples,
                                         std::uint64_t seed) {
    std::vector<std::string> bad;
    const System& sys = engine.system();
    const NormTable& nt = engine.norms();
    const Base& fix = engine.fixpoint();
    int n = sys.num_constants();
    std::mt19937_64 rng(seed);

    for (int i = 0; i < samples; ++i) {
        Process a = sample_process(rng, n, 3);
        Process b = sample_process(rng, n, 3);
        Process ab = a.concat(b);
        if (nt.strong_of(ab) != nat_add(nt.strong_of(a), nt.strong_of(b)))
            bad.push_back("strong norm not additive");
        if (nt.weak_of(ab) != nat_add(nt.weak_of(a), nt.weak_of(b)))
            bad.push_back("weak norm not additive");
        Mask r = engine.qualified_sets()[rnd_below(
            rng, static_cast<int>(engine.qualified_sets().size()))];
        if (fix.semantic_norm(r, a) > nt.strong_of(a))
            bad.push_back("semantic norm exceeds strong norm");
        if (fix.b_equal(r, a, b) &&
            fix.semantic_norm(r, a) != fix.semantic_norm(r, b))
            bad.push_back("base-equal processes with different norms");
    }
    return bad;
}

FuzzReport fuzz_compare(const FuzzOptions& options) {
    FuzzReport rep;
    if (!options.repro_dir.empty())
        std::filesystem::create_directories(options.repro_dir);

    for (int t = 0; t < options.trials; ++t) {
        GenParams gp = options.gen;
        gp.seed = options.gen.seed + static_cast<std::uint64_t>(t);
        System sys;
        try {
            sys = generate_system(gp);
        } catch (const Error& e) {
            rep.errors.push_back("trial " + std::to_string(t) + " gen: " +
                                 e.what());
            continue;
        }
        Engine eng(sys, options.engine);
        try {
            eng.compute_fixpoint();
        } catch (const Error& e) {
            rep.errors.push_back("trial " + std::to_string(t) + " engine: " +
                                 e.what());
            continue;
        }
        ++rep.trials_run;

        if (options.check_properties) {
            for (auto& f : check_engine_properties(eng, gp.seed))
                rep.prop_failures.push_back("trial " + std::to_string(t) +
                                            ": " + f);
            for (auto& f : check_norm_laws(eng, 10, gp.seed))
                rep.prop_failures.push_back("trial " + std::to_string(t) +
                                            ": " + f);
        }

        // The oracle side runs on its own saturation cache.
        RelCache ocache(sys);
        std::mt19937_64 rng(options.seed ^
                            (0x9e3779b97f4a7c15ull *
                             (static_cast<std::uint64_t>(t) + 1)));
        int n = sys.num_constants();

        for (int k = 0; k < options.pairs_per_trial; ++k) {
            Mask r0 = sample_ref_set(rng, sys, k);
            Mask r = qualify(sys, r0);
            auto [p, q] = sample_pair(rng, n, k);
            ++rep.queries;
            bool ev;
            Verdict ov;
            try {
                ev = eng.decide(r, p, q);
                ov = oracle_decide(ocache, r, p, q, options.caps);
            } catch (const Error& e) {
                rep.errors.push_back("trial " + std::to_string(t) +
                                     " query: " + e.what());
                continue;
            }
            if (ov == Verdict::Unknown) {
                ++rep.unknowns;
                continue;
            }
            bool ob = (ov == Verdict::True);
            if (ev == ob) {
                ++rep.agreements;
                continue;
            }
            std::string desc = "trial " + std::to_string(t) + " R=" +
                               sys.format_ref_set(r) + " p=" +
                               sys.format_process(p) + " q=" +
                               sys.format_process(q) + " engine=" +
                               (ev ? "EQUIV" : "NONEQUIV") + " oracle=" +
                               verdict_str(ov);
            if (!options.repro_dir.empty()) {
                std::string path = options.repro_dir + "/mismatch-" +
                                   std::to_string(t) + "-" +
                                   std::to_string(k) + ".bpa";
                std::ofstream out(path);
                out << "# " << desc << "\n" << sys.print();
                desc += " (" + path + ")";
            }
            rep.mismatches.push_back(desc);
        }

        if (options.check_properties) {
            // Oracle-side lemmas on a small completed fragment.
            const RelContext& ctx = ocache.get(qualify(sys, 0));
            std::vector<Process> seeds;
            for (int k = 0; k < 3; ++k)
                seeds.push_back(sample_process(rng, n, 2));
            OracleCaps small{200, 8};
            if (auto lts = explore_fragment(ctx, seeds, small)) {
                auto cls = relative_bisim_finite(*lts);
                if (!verify_r_bisim(*lts, cls))
                    rep.prop_failures.push_back(
                        "trial " + std::to_string(t) +
                        ": oracle relation is not an R-bisimulation");
                if (!verify_computation_lemma(*lts, cls))
                    rep.prop_failures.push_back(
                        "trial " + std::to_string(t) +
                        ": computation lemma violated on fragment");
            }

            // Monotonicity in R and a congruence sample, via queries.
            const auto& qs = eng.qualified_sets();
            for (int k = 0; k < 5; ++k) {
                Mask r2 = qs[rnd_below(rng, static_cast<int>(qs.size()))];
                std::vector<Mask> subs;
                for (Mask r1 : qs)
                    if (mask_subset(r1, r2)) subs.push_back(r1);
                Mask r1 = subs[rnd_below(rng, static_cast<int>(subs.size()))];
                auto [p, q] = sample_pair(rng, n, k);
                Verdict v1 = oracle_decide(ocache, r1, p, q, options.caps);
                Verdict v2 = oracle_decide(ocache, r2, p, q, options.caps);
                if (v1 == Verdict::True && v2 == Verdict::False)
                    rep.prop_failures.push_back(
                        "trial " + std::to_string(t) +
                        ": oracle not monotone in R");
            }
            for (int k = 0; k < 5; ++k) {
                Mask r = qs[rnd_below(rng, static_cast<int>(qs.size()))];
                Process a = sample_process(rng, n, 2);
                Process b = sample_process(rng, n, 2);
                Process c = sample_process(rng, n, 2);
                Process d = sample_process(rng, n, 2);
                Verdict vg = oracle_decide(ocache, r, c, d, options.caps);
                Verdict va = oracle_decide(ocache, qualify(sys, 0), a, b,
                                           options.caps);
                if (vg != Verdict::True || va != Verdict::True) continue;
                Verdict vc = oracle_decide(ocache, r, a.concat(c),
                                           b.concat(d), options.caps);
                if (vc == Verdict::False)
                    rep.prop_failures.push_back(
                        "trial " + std::to_string(t) +
                        ": oracle congruence sample violated");
            }
        }
    }
    return rep;
}

}  // namespace bpa
