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

#include "bpa/relativization.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace bpa {

namespace {

Mask bits_of(const std::vector<int>& syms, std::size_t from,
             std::size_t to_excl) {
    Mask m = 0;
    for (std::size_t i = from; i < to_excl; ++i) m |= mask_bit(syms[i]);
    return m;
}

}  // namespace

RelContext::RelContext(const System& sys, Mask R, ReachMode mode)
    : sys_(&sys), R_(R), mode_(mode), ground_(sys.ground_mask()) {
    if (!mask_subset(R, ground_))
        throw Error("reference set must consist of ground constants");
    int n = sys.num_constants();
    creach_.assign(n, 0);
    grh_.assign(n, 0);
    gc_.assign(n, 0);
    block_of_.assign(n, -1);

    saturate_reach();

    // Qualification: no constant outside R may be mutually silently
    // reachable with the empty process modulo R.
    for (int c = 0; c < n && qualified_; ++c) {
        if (mask_has(R_, c)) continue;
        bool to_eps = mask_has(ground_, c);
        bool from_eps = mask_has(eps_reach_, c);
        if (mode_ == ReachMode::Mutual)
            qualified_ = !(to_eps && from_eps);
        else
            qualified_ = !(to_eps || from_eps);
    }

    saturate_ground_tables();
    if (qualified_) {
        build_blocks();
        build_propagating();
        build_derived();
    }
}

Process RelContext::rnf(const Process& p) const {
    std::size_t end = p.size();
    while (end > 0 && mask_has(R_, p.syms[end - 1])) --end;
    return Process{std::vector<int>(p.syms.begin(),
                                    p.syms.begin() + static_cast<long>(end))};
}

Mask RelContext::raw_string_reach(const Process& s) const {
    // s must be in R-normal form.  A single constant Z is reachable
    // only by silently erasing everything ahead of the last position;
    // interior constants erase exactly when they are ground.
    if (s.empty()) return eps_reach_;
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
        if (!mask_has(ground_, s.syms[i])) return 0;
    return creach_[s.syms.back()];
}

Mask RelContext::string_reach_set(const Process& p) const {
    return raw_string_reach(rnf(p));
}

bool RelContext::string_erases(const Process& p) const {
    return sys_->is_ground(p);
}

void RelContext::saturate_reach() {
    int n = sys_->num_constants();
    for (int c = 0; c < n; ++c)
        if (!mask_has(R_, c)) creach_[c] = mask_bit(c);

    bool changed = true;
    while (changed) {
        changed = false;
        for (const Rule& r : sys_->rules()) {
            if (r.action != kTau) continue;
            Mask tgt = raw_string_reach(rnf(r.rhs));
            if (mask_has(R_, r.lhs)) {
                if ((eps_reach_ | tgt) != eps_reach_) {
                    eps_reach_ |= tgt;
                    changed = true;
                }
            } else {
                if ((creach_[r.lhs] | tgt) != creach_[r.lhs]) {
                    creach_[r.lhs] |= tgt;
                    changed = true;
                }
            }
        }
        // A ground constant silently erases, after which the ε-row of R
        // keeps generating.
        for (int c = 0; c < n; ++c) {
            if (mask_has(R_, c) || !mask_has(ground_, c)) continue;
            if ((creach_[c] | eps_reach_) != creach_[c]) {
                creach_[c] |= eps_reach_;
                changed = true;
            }
        }
    }
}

void RelContext::saturate_ground_tables() {
    int n = sys_->num_constants();

    // grh_[c]: heads of nonempty all-ground strings plainly silently
    // reachable from c.  gc_[c]: all constants of such strings (empty
    // string excluded implicitly: it contributes no constants).
    auto grh_str = [&](const Process& s) {
        Mask m = 0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            bool tail_ground = true;
            for (std::size_t j = i + 1; j < s.size(); ++j)
                tail_ground &= mask_has(ground_, s.syms[j]);
            if (tail_ground) m |= grh_[s.syms[i]];
            if (!mask_has(ground_, s.syms[i])) break;
        }
        return m;
    };
    auto gc_str = [&](const Process& s) {
        Mask m = 0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            bool tail_ground = true;
            for (std::size_t j = i + 1; j < s.size(); ++j)
                tail_ground &= mask_has(ground_, s.syms[j]);
            if (tail_ground && gc_[s.syms[i]] != 0)
                m |= gc_[s.syms[i]] | bits_of(s.syms, i + 1, s.size());
            if (!mask_has(ground_, s.syms[i])) break;
        }
        return m;
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (int c = 0; c < n; ++c) {
            Mask g = mask_has(ground_, c) ? mask_bit(c) : 0;
            Mask base_grh = g, base_gc = g;
            for (int ri : sys_->rules_of(c)) {
                const Rule& r = sys_->rules()[ri];
                if (r.action != kTau) continue;
                base_grh |= grh_str(r.rhs);
                base_gc |= gc_str(r.rhs);
            }
            if (base_grh != grh_[c]) { grh_[c] = base_grh; changed = true; }
            if (base_gc != gc_[c]) { gc_[c] = base_gc; changed = true; }
        }
    }
}

void RelContext::build_blocks() {
    int n = sys_->num_constants();
    std::vector<int> outside;
    for (int c = 0; c < n; ++c)
        if (!mask_has(R_, c)) outside.push_back(c);

    std::vector<Mask> member_sets;
    if (mode_ == ReachMode::Mutual) {
        for (int c : outside) {
            if (block_of_[c] >= 0) continue;
            Mask members = 0;
            for (int d : outside)
                if (reaches(c, d) && reaches(d, c)) members |= mask_bit(d);
            int b = static_cast<int>(member_sets.size());
            member_sets.push_back(members);
            for (int d : outside)
                if (mask_has(members, d)) block_of_[d] = b;
        }
    } else {
        // Experimental reading: connected components of the symmetric
        // closure of one-step-of-⟹ reachability.
        std::vector<int> parent(n);
        for (int c : outside) parent[c] = c;
        std::function<int(int)> find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (int c : outside)
            for (int d : outside)
                if (c != d && (reaches(c, d) || reaches(d, c)))
                    parent[find(c)] = find(d);
        std::map<int, int> root_to_block;
        for (int c : outside) {
            int r = find(c);
            auto [it, fresh] = root_to_block.try_emplace(
                r, static_cast<int>(member_sets.size()));
            if (fresh) member_sets.push_back(0);
            member_sets[it->second] |= mask_bit(c);
            block_of_[c] = it->second;
        }
    }

    int nb = static_cast<int>(member_sets.size());
    blocks_.assign(nb, {});
    for (int b = 0; b < nb; ++b) {
        blocks_[b].members = member_sets[b];
        blocks_[b].rep = __builtin_ctzll(member_sets[b]);
        blocks_[b].rank = -1;
    }

    // Cross-block silent reachability; order so that every reach target
    // ranks strictly below its source (sinks get rank 0).  Ties go to
    // the block with the least representative, for reproducibility.
    std::vector<std::set<int>> succ(nb);
    for (int b = 0; b < nb; ++b) {
        Mask out = 0;
        for (int c : outside)
            if (mask_has(blocks_[b].members, c)) out |= creach_[c];
        out &= ~blocks_[b].members;
        for (int c : outside)
            if (mask_has(out, c)) succ[b].insert(block_of_[c]);
    }
    int next_rank = 0;
    while (next_rank < nb) {
        int pick = -1;
        for (int b = 0; b < nb; ++b) {
            if (blocks_[b].rank >= 0) continue;
            bool ready = true;
            for (int s : succ[b]) ready &= (blocks_[s].rank >= 0);
            if (!ready) continue;
            if (pick < 0 || blocks_[b].rep < blocks_[pick].rep) pick = b;
        }
        if (pick < 0)
            throw Error("internal: cyclic block condensation");
        blocks_[pick].rank = next_rank++;
    }
}

void RelContext::build_propagating() {
    int n = sys_->num_constants();
    using PairSet = std::set<std::pair<int, int>>;
    std::vector<PairSet> pp(n);  // per standalone constant outside R
    PairSet pp_eps;

    // pairs (Y, X') with <string> ⟹_R Y.ζ.X'.δ, Y.ζ ground, δ ∈ R*;
    // evaluated structurally over suffixes of rule images.
    std::function<PairSet(const Process&)> eval = [&](const Process& s) {
        if (s.empty()) return pp_eps;
        if (s.size() == 1) return pp[s.syms[0]];
        PairSet out;
        bool mid_ground = true;
        for (std::size_t j = 1; j + 1 < s.size(); ++j)
            mid_ground &= mask_has(ground_, s.syms[j]);
        if (mid_ground) {
            Mask heads = grh_[s.syms[0]];
            for (int y = 0; y < n; ++y)
                if (mask_has(heads, y)) out.emplace(y, s.syms.back());
        }
        if (mask_has(ground_, s.syms[0])) {
            PairSet rest = eval(s.suffix_from(1));
            out.insert(rest.begin(), rest.end());
        }
        return out;
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (int c = 0; c < n; ++c) {
            if (mask_has(R_, c)) continue;
            PairSet v;
            for (int ri : sys_->rules_of(c)) {
                const Rule& r = sys_->rules()[ri];
                if (r.action != kTau) continue;
                PairSet part = eval(rnf(r.rhs));
                v.insert(part.begin(), part.end());
            }
            if (mask_has(ground_, c))
                v.insert(pp_eps.begin(), pp_eps.end());
            if (v != pp[c]) { pp[c] = std::move(v); changed = true; }
        }
        PairSet e;
        for (const Rule& r : sys_->rules()) {
            if (r.action != kTau || !mask_has(R_, r.lhs)) continue;
            PairSet part = eval(rnf(r.rhs));
            e.insert(part.begin(), part.end());
        }
        if (e != pp_eps) { pp_eps = std::move(e); changed = true; }
    }

    for (auto& b : blocks_) {
        Mask prop = 0;
        for (int c = 0; c < n; ++c) {
            if (!mask_has(b.members, c)) continue;
            for (auto [y, xp] : pp[c])
                if (mask_has(b.members, xp)) prop |= mask_bit(y);
        }
        b.propagating = prop;
    }
}

void RelContext::build_derived() {
    int n = sys_->num_constants();
    for (auto& b : blocks_) {
        std::vector<DerivedTransition> out;
        auto add = [&](int action, Process target) {
            DerivedTransition dt{action, std::move(target)};
            if (std::find(out.begin(), out.end(), dt) == out.end())
                out.push_back(std::move(dt));
        };
        // Clause 1: moves of members, minus silent moves that stay
        // inside the block.
        for (int c = 0; c < n; ++c) {
            if (!mask_has(b.members, c)) continue;
            for (int ri : sys_->rules_of(c)) {
                const Rule& r = sys_->rules()[ri];
                Process tgt = rnf(r.rhs);
                if (r.action == kTau &&
                    (raw_string_reach(tgt) & b.members) != 0)
                    continue;
                add(r.action, std::move(tgt));
            }
        }
        // Clause 2: moves of propagating heads, re-suffixed with the
        // representative, minus silent moves whose residue erases.
        for (int y = 0; y < n; ++y) {
            if (!mask_has(b.propagating, y)) continue;
            for (int ri : sys_->rules_of(y)) {
                const Rule& r = sys_->rules()[ri];
                Process tgt = rnf(r.rhs);
                if (r.action == kTau && sys_->is_ground(tgt)) continue;
                tgt.syms.push_back(b.rep);
                add(r.action, std::move(tgt));
            }
        }
        b.derived = std::move(out);
    }
}

std::vector<std::pair<int, Process>> RelContext::r_transitions(
    const Process& p) const {
    std::vector<std::pair<int, Process>> out;
    auto add = [&](int action, Process target) {
        std::pair<int, Process> e{action, std::move(target)};
        if (std::find(out.begin(), out.end(), e) == out.end())
            out.push_back(std::move(e));
    };
    if (!p.empty()) {
        for (auto& [act, q] : sys_->step(p)) add(act, rnf(q));
    } else {
        for (int c = 0; c < sys_->num_constants(); ++c) {
            if (!mask_has(R_, c)) continue;
            for (int ri : sys_->rules_of(c)) {
                const Rule& r = sys_->rules()[ri];
                add(r.action, rnf(r.rhs));
            }
        }
    }
    return out;
}

Mask qualify(const System& sys, Mask R, ReachMode mode) {
    if (!mask_subset(R, sys.ground_mask()))
        throw Error("reference set must consist of ground constants");
    Mask cur = R;
    for (;;) {
        RelContext ctx(sys, cur, mode);
        if (ctx.qualified()) return cur;
        Mask add = 0;
        for (int c = 0; c < sys.num_constants(); ++c) {
            if (mask_has(cur, c)) continue;
            bool to_eps = mask_has(sys.ground_mask(), c);
            bool from_eps = mask_has(ctx.eps_reach(), c);
            bool bad = (mode == ReachMode::Mutual) ? (to_eps && from_eps)
                                                   : (to_eps || from_eps);
            // Only ground constants may join a reference set; under the
            // mutual reading every violator is ground by definition.
            if (bad && mask_has(sys.ground_mask(), c)) add |= mask_bit(c);
        }
        if (add == 0)
            throw Error("cannot qualify: non-ground violator under the "
                        "symmetric-closure reading");
        cur |= add;
    }
}

const RelContext& RelCache::get(Mask R) {
    auto it = store_.find(R);
    if (it == store_.end())
        it = store_.emplace(R, std::make_unique<RelContext>(*sys_, R, mode_))
                 .first;
    return *it->second;
}

}  // namespace bpa
