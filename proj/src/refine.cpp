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

#include "bpa/refine.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>

namespace bpa {

namespace {

Mask bits_of(const Process& p) {
    Mask m = 0;
    for (int c : p.syms) m |= mask_bit(c);
    return m;
}

}  // namespace

EngineOptions EngineOptions::from_env() {
    EngineOptions o;
    if (const char* v = std::getenv("BPA_ITER_CAP"))
        o.iter_cap = std::strtoull(v, nullptr, 10);
    if (const char* v = std::getenv("BPA_SLICE_CAP"))
        o.slice_cap = std::strtoull(v, nullptr, 10);
    return o;
}

Engine::Engine(const System& sys, EngineOptions opt)
    : sys_(&sys),
      opt_(opt),
      norms_(validate_normed(sys)),
      cache_(sys, opt.reach_mode) {
    Mask cg = sys.ground_mask();
    std::uint64_t count = 0;
    // Enumerate all subsets of C_G, keep the qualified ones.
    Mask sub = 0;
    for (;;) {
        if (++count > opt_.slice_cap)
            throw CapExceededError("reference-set cap exceeded (" +
                                   std::to_string(opt_.slice_cap) + ")");
        if (cache_.get(sub).qualified()) qualified_.push_back(sub);
        if (sub == cg) break;
        sub = (sub - cg) & cg;  // next subset of cg
    }
    std::sort(qualified_.begin(), qualified_.end());
}

nat128 Engine::effective_m_cap() const {
    if (opt_.m_cap != 0) return opt_.m_cap;
    nat128 mx = 1;
    for (nat128 s : norms_.strong) mx = std::max(mx, s);
    return nat_mul(2, mx);
}

Base Engine::initial_base() {
    Mask cg = sys_->ground_mask();
    Base b(*sys_, opt_.exp_caps);
    for (Mask r : qualified_) b.id_map()[r] = cg;

    const RelContext& ctx = cache_.get(cg);
    Slice sl;
    sl.ref = cg;
    sl.rep_of.assign(sys_->num_constants(), -1);
    for (int c = 0; c < sys_->num_constants(); ++c)
        if (ctx.block_of(c) >= 0)
            sl.rep_of[c] = ctx.block(ctx.block_of(c)).rep;

    // Prime: the least block (in <_{C_G}) of weak-norm-1 constants;
    // everything else rewrites to that prime, weak-norm many times.
    int prime_block = -1;
    for (int i = 0; i < ctx.block_count(); ++i) {
        const auto& bd = ctx.block(i);
        nat128 wk = norms_.weak[bd.rep];
        for (int c = 0; c < sys_->num_constants(); ++c)
            if (mask_has(bd.members, c) && norms_.weak[c] != wk)
                throw Error("internal: block members differ in weak norm");
        if (wk == 1 &&
            (prime_block < 0 || bd.rank < ctx.block(prime_block).rank))
            prime_block = i;
    }
    if (ctx.block_count() > 0 && prime_block < 0)
        throw Error("internal: no weak-norm-1 block in a non-ground system");

    int seq = 1;
    std::vector<int> order(ctx.block_count());
    for (int i = 0; i < ctx.block_count(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int bb) {
        return ctx.block(a).rank < ctx.block(bb).rank;
    });

    BlockKey prime_key{};
    if (prime_block >= 0)
        prime_key = BlockKey{cg, ctx.block(prime_block).rep};

    // Prime first, then composites in order, for a stable ord column.
    std::vector<int> treat;
    if (prime_block >= 0) treat.push_back(prime_block);
    for (int i : order)
        if (i != prime_block) treat.push_back(i);

    for (int i : treat) {
        const auto& bd = ctx.block(i);
        BlockEntry e;
        e.members = bd.members;
        e.rank = bd.rank;
        e.treat_seq = seq++;
        e.norm = norms_.weak[bd.rep];
        e.norm_set = true;
        if (i == prime_block) {
            e.kind = BlockKind::Prime;
            e.rd = cg;
        } else {
            e.kind = BlockKind::Composite;
            nat128 wk = norms_.weak[bd.rep];
            if (wk > opt_.exp_caps.dc_expansion)
                throw CapExceededError("initial dc string too long");
            e.dc.assign(static_cast<std::size_t>(wk), prime_key);
        }
        sl.blocks[bd.rep] = std::move(e);
    }
    b.slices()[cg] = std::move(sl);
    return b;
}

Mask Engine::computing_id(const Base& D, Mask R) {
    const RelContext& ctx = cache_.get(R);
    Mask idd = D.id_of(R);
    Process eps;
    auto eps_moves = ctx.r_transitions(eps);

    // The matching conditions are against the OLD base and Id set, so
    // each constant's status can be evaluated up front.
    auto violates = [&](int x) {
        for (int ri : sys_->rules_of(x)) {
            const Rule& r = sys_->rules()[ri];
            Process alpha = ctx.rnf(r.rhs);
            if (r.action == kTau && mask_subset(bits_of(alpha), idd)) continue;
            bool matched = false;
            for (auto& [act, beta] : eps_moves) {
                if (act != r.action) continue;
                if (D.b_equal(R, alpha, beta)) {
                    matched = true;
                    break;
                }
            }
            if (!matched) return true;
        }
        return false;
    };

    if (opt_.id_mode == IdMode::Candidate) {
        Mask out = R;
        for (int c = 0; c < sys_->num_constants(); ++c)
            if (mask_has(idd & ~R, c) && !violates(c)) out |= mask_bit(c);
        return out;
    }

    Mask id = idd;
    for (;;) {
        int bad = -1;
        for (int c = 0; c < sys_->num_constants(); ++c) {
            if (!mask_has(id & ~R, c)) continue;
            if (violates(c)) {
                bad = c;
                break;
            }
        }
        if (bad < 0) break;
        // Remove every member whose silent ground paths pass through
        // the violator.
        Mask before = id;
        for (int c = 0; c < sys_->num_constants(); ++c) {
            if (!mask_has(id & ~R, c)) continue;
            if (mask_has(ctx.ground_context_reach(c), bad))
                id &= ~mask_bit(c);
        }
        if (id == before)
            throw Error("internal: Id sweep removed nothing");
    }
    return id;
}

Mask Engine::computing_rd(const Base& D, Mask R, int rep) {
    const RelContext& ctx = cache_.get(R);
    const auto& bd = ctx.block(ctx.block_of(rep));
    Process x = Process::single(rep);

    Mask t = 0;
    for (int w = 0; w < sys_->num_constants(); ++w) {
        if (!sys_->is_ground_const(w)) continue;
        if (D.b_equal(R, Process::single(w).concat(x), x)) t |= mask_bit(w);
    }

    Mask rd = t;
    auto violates = [&](int y) {
        for (int ri : sys_->rules_of(y)) {
            const Rule& r = sys_->rules()[ri];
            if (r.action == kTau && mask_subset(bits_of(r.rhs), t)) continue;
            Process zx = r.rhs.concat(x);
            bool matched = false;
            for (const DerivedTransition& dt : bd.derived) {
                if (dt.action != r.action) continue;
                if (D.b_equal(R, zx, dt.target)) {
                    matched = true;
                    break;
                }
            }
            if (!matched) return true;
        }
        return false;
    };

    for (;;) {
        int bad = -1;
        for (int c = 0; c < sys_->num_constants(); ++c) {
            if (!mask_has(rd, c)) continue;
            if (violates(c)) {
                bad = c;
                break;
            }
        }
        if (bad < 0) break;
        Mask before = rd;
        for (int c = 0; c < sys_->num_constants(); ++c) {
            if (!mask_has(rd, c)) continue;
            if (mask_has(ctx.ground_context_reach(c), bad))
                rd &= ~mask_bit(c);
        }
        if (rd == before)
            throw Error("internal: Rd sweep removed nothing");
    }
    return rd;
}

bool Engine::expand(const Base& B, const Base& D, Mask R, int X,
                    const BlockString& cand, nat128 m) {
    const RelContext& ctx = cache_.get(R);
    const auto& bd = ctx.block(ctx.block_of(X));
    const RelContext& hctx = cache_.get(cand.front().ref);
    const auto& head = hctx.block(hctx.block_of(cand.front().rep));

    Process prod;
    for (const BlockKey& k : cand) prod.syms.push_back(k.rep);
    Process tail = prod.suffix_from(1);

    if (!D.b_equal(R, Process::single(X), prod)) return false;

    // Every derived move of [X]_R is matched from the candidate: with
    // the new equality on norm-decreasing targets, with the old one
    // (silent stutter allowed) otherwise.
    for (const DerivedTransition& dt : bd.derived) {
        auto dn = B.semantic_norm_partial(R, dt.target);
        bool matched = false;
        if (dn && nat_add(*dn, 1) == m) {
            for (const DerivedTransition& h : head.derived) {
                if (h.action != dt.action) continue;
                if (B.b_equal_partial(R, dt.target, h.target.concat(tail))) {
                    matched = true;
                    break;
                }
            }
        } else {
            if (dt.action == kTau && D.b_equal(R, dt.target, prod))
                matched = true;
            for (const DerivedTransition& h : head.derived) {
                if (matched) break;
                if (h.action != dt.action) continue;
                if (D.b_equal(R, dt.target, h.target.concat(tail)))
                    matched = true;
            }
        }
        if (!matched) return false;
    }

    // And symmetrically, unless a norm-preserving silent move of [X]_R
    // already hits the candidate under the new equality.
    for (const DerivedTransition& dt : bd.derived) {
        if (dt.action == kTau && B.b_equal_partial(R, dt.target, prod))
            return true;
    }
    for (const DerivedTransition& h : head.derived) {
        Process t = h.target.concat(tail);
        auto tn = B.semantic_norm_partial(R, t);
        bool matched = false;
        if (tn && nat_add(*tn, 1) == m) {
            for (const DerivedTransition& dt : bd.derived) {
                if (dt.action != h.action) continue;
                if (B.b_equal_partial(R, dt.target, t)) {
                    matched = true;
                    break;
                }
            }
        } else {
            for (const DerivedTransition& dt : bd.derived) {
                if (dt.action != h.action) continue;
                if (D.b_equal(R, dt.target, t)) {
                    matched = true;
                    break;
                }
            }
        }
        if (!matched) return false;
    }
    return true;
}

std::vector<BlockString> Engine::enumerate_candidates(const Base& B, Mask R,
                                                      int X, nat128 m) {
    const RelContext& ctx = cache_.get(R);
    const auto& bd = ctx.block(ctx.block_of(X));
    int my_rank = bd.rank;
    std::set<BlockString> cands;

    for (const DerivedTransition& dt : bd.derived) {
        auto dec = B.dcmp_partial(R, dt.target);
        if (!dec) continue;
        nat128 dn = 0;
        bool known = true;
        for (const BlockKey& k : *dec) {
            const BlockEntry& e = B.entry(k);
            if (!e.norm_set) {
                known = false;
                break;
            }
            dn = nat_add(dn, e.norm);
        }
        if (!known || nat_add(dn, 1) != m) continue;

        // Each split: a treated prime head prepended to a suffix of the
        // witness decomposition, completing the norm to m.
        for (std::size_t suf = 0; suf <= dec->size(); ++suf) {
            BlockString suffix(dec->end() - static_cast<long>(suf),
                               dec->end());
            nat128 sn = 0;
            for (const BlockKey& k : suffix)
                sn = nat_add(sn, B.entry(k).norm);
            if (sn >= m) continue;
            nat128 need = m - sn;
            Mask rk = suffix.empty() ? R : B.entry(suffix.front()).rd;
            auto sit = B.slices().find(rk);
            if (sit == B.slices().end()) continue;
            for (const auto& [rep, e] : sit->second.blocks) {
                if (e.kind != BlockKind::Prime) continue;
                if (e.norm != need) continue;
                if (suffix.empty()) {
                    // Single-block candidates need a head strictly
                    // below X in the block order.
                    if (e.rank >= my_rank) continue;
                }
                BlockString cand;
                cand.push_back(BlockKey{rk, rep});
                cand.insert(cand.end(), suffix.begin(), suffix.end());
                cands.insert(std::move(cand));
            }
        }
    }
    return {cands.begin(), cands.end()};
}

Base Engine::construct_new_base(const Base& D,
                                std::vector<std::string>* notes) {
    Base b(*sys_, opt_.exp_caps);
    for (Mask r : qualified_) b.id_map()[r] = computing_id(D, r);

    for (Mask r : qualified_) {
        if (b.id_map().at(r) != r) continue;
        const RelContext& ctx = cache_.get(r);
        Slice sl;
        sl.ref = r;
        sl.rep_of.assign(sys_->num_constants(), -1);
        for (int c = 0; c < sys_->num_constants(); ++c)
            if (ctx.block_of(c) >= 0)
                sl.rep_of[c] = ctx.block(ctx.block_of(c)).rep;
        for (int i = 0; i < ctx.block_count(); ++i) {
            const auto& bd = ctx.block(i);
            BlockEntry e;
            e.members = bd.members;
            e.rank = bd.rank;
            sl.blocks[bd.rep] = std::move(e);
        }
        b.slices()[r] = std::move(sl);
    }

    struct Ref {
        Mask r;
        int rep;
    };
    std::vector<Ref> untreated;
    for (auto& [r, sl] : b.slices())
        for (auto& [rep, e] : sl.blocks) untreated.push_back({r, rep});

    auto entry_of = [&](const Ref& u) -> BlockEntry& {
        return b.slices().at(u.r).blocks.at(u.rep);
    };
    auto rank_of = [&](const Ref& u) { return entry_of(u).rank; };
    auto drop = [&](const Ref& u) {
        untreated.erase(
            std::remove_if(untreated.begin(), untreated.end(),
                           [&](const Ref& v) {
                               return v.r == u.r && v.rep == u.rep;
                           }),
            untreated.end());
    };
    auto derived_of = [&](const Ref& u) -> const std::vector<DerivedTransition>& {
        const RelContext& ctx = cache_.get(u.r);
        return ctx.block(ctx.block_of(u.rep)).derived;
    };

    // More than one candidate passing expansion can happen while the
    // old base is still coarse (its equality may merge the stutter
    // targets of rival candidates).  Prefer the candidate confirmed by
    // a norm-preserving silent move under the new base; the next
    // iteration's finer equality rejects the losers at the first
    // expansion check.  Every such event is recorded in the notes.
    auto tau_witnessed = [&](const Ref& u, const BlockString& c) {
        Process prod;
        for (const BlockKey& k : c) prod.syms.push_back(k.rep);
        for (const DerivedTransition& dt : derived_of(u))
            if (dt.action == kTau && b.b_equal_partial(u.r, dt.target, prod))
                return true;
        return false;
    };
    auto resolve_ambiguity = [&](const Ref& u, std::vector<BlockString>& passed,
                                 nat128 lvl) {
        if (passed.size() <= 1) return;
        std::string msg = "ambiguous expansion: block " +
                          b.format_block(BlockKey{u.r, u.rep}) + " level " +
                          nat_str(lvl);
        for (auto& c : passed) msg += " cand=" + b.format_block_string(c);
        std::vector<BlockString> wit;
        for (auto& c : passed)
            if (tau_witnessed(u, c)) wit.push_back(c);
        if (!wit.empty()) passed = std::move(wit);
        passed.resize(1);
        if (notes)
            notes->push_back(msg + " chose=" +
                             b.format_block_string(passed.front()));
    };

    nat128 m = 1;
    nat128 m_cap = effective_m_cap();
    int seq = 0;

    while (!untreated.empty()) {
        if (m > m_cap)
            throw CapExceededError("level cap exceeded during construction");

        // First loop: blocks with a derived move to a treated target of
        // norm m-1; smallest reference set first, then the block order.
        for (;;) {
            const Ref* pick = nullptr;
            for (const Ref& u : untreated) {
                bool ok = false;
                for (const DerivedTransition& dt : derived_of(u)) {
                    auto n = b.semantic_norm_partial(u.r, dt.target);
                    if (n && nat_add(*n, 1) == m) {
                        ok = true;
                        break;
                    }
                }
                if (!ok) continue;
                if (!pick || u.r < pick->r ||
                    (u.r == pick->r && rank_of(u) < rank_of(*pick)))
                    pick = &u;
            }
            if (!pick) break;
            Ref u = *pick;
            BlockEntry& e = entry_of(u);
            e.norm = m;
            e.norm_set = true;
            auto cands = enumerate_candidates(b, u.r, u.rep, m);
            std::vector<BlockString> passed;
            for (auto& c : cands)
                if (expand(b, D, u.r, u.rep, c, m)) passed.push_back(c);
            resolve_ambiguity(u, passed, m);
            if (passed.size() == 1) {
                e.kind = BlockKind::Composite;
                e.dc = passed[0];
            } else {
                e.kind = BlockKind::Prime;
                e.rd = computing_rd(D, u.r, u.rep);
                auto it = b.id_map().find(e.rd);
                if (it == b.id_map().end() || it->second != e.rd)
                    throw Error("internal: computed rd is not admissible: "
                                "block " + b.format_block(BlockKey{u.r, u.rep}) +
                                " rd=" + sys_->format_ref_set(e.rd) +
                                " id(rd)=" +
                                (it == b.id_map().end()
                                     ? std::string("<unqualified>")
                                     : sys_->format_ref_set(it->second)) +
                                " level=" + nat_str(m));
            }
            e.treat_seq = ++seq;
            drop(u);
        }

        // Second loop: norm-preserving silent witnesses; failures are
        // deferred to the next level.
        std::vector<Ref> deferred;
        for (;;) {
            const Ref* pick = nullptr;
            for (const Ref& u : untreated) {
                bool ok = false;
                for (const DerivedTransition& dt : derived_of(u)) {
                    if (dt.action != kTau) continue;
                    auto n = b.semantic_norm_partial(u.r, dt.target);
                    if (n && *n == m) {
                        ok = true;
                        break;
                    }
                }
                if (!ok) continue;
                if (!pick || u.r < pick->r ||
                    (u.r == pick->r && rank_of(u) < rank_of(*pick)))
                    pick = &u;
            }
            if (!pick) break;
            Ref u = *pick;
            std::set<BlockString> cands;
            for (const DerivedTransition& dt : derived_of(u)) {
                if (dt.action != kTau) continue;
                auto n = b.semantic_norm_partial(u.r, dt.target);
                if (n && *n == m) cands.insert(*b.dcmp_partial(u.r, dt.target));
            }
            std::vector<BlockString> passed;
            for (const auto& c : cands)
                if (expand(b, D, u.r, u.rep, c, m)) passed.push_back(c);
            resolve_ambiguity(u, passed, m);
            BlockEntry& e = entry_of(u);
            if (passed.size() == 1) {
                e.norm = m;
                e.norm_set = true;
                e.kind = BlockKind::Composite;
                e.dc = passed[0];
                e.treat_seq = ++seq;
            } else {
                deferred.push_back(u);
                if (notes)
                    notes->push_back("deferred " +
                                     b.format_block(BlockKey{u.r, u.rep}) +
                                     " at level " + nat_str(m));
            }
            drop(u);
        }
        untreated.insert(untreated.end(), deferred.begin(), deferred.end());
        m = nat_add(m, 1);
    }
    return b;
}

const IterationTrace& Engine::compute_fixpoint() {
    if (trace_) return *trace_;
    IterationTrace tr;
    tr.bases.push_back(initial_base());
    for (;;) {
        if (static_cast<std::uint64_t>(tr.constructions) >= opt_.iter_cap)
            throw CapExceededError("iteration cap exceeded (" +
                                   std::to_string(opt_.iter_cap) + ")");
        Base next = construct_new_base(tr.bases.back(), &tr.notes);
        ++tr.constructions;
        bool same = next.structurally_equal(tr.bases.back());
        tr.bases.push_back(std::move(next));
        if (same) {
            tr.converged = true;
            break;
        }
    }
    trace_ = std::move(tr);
    return *trace_;
}

bool Engine::decide(Mask R, const Process& p, const Process& q) {
    if (!mask_subset(R, sys_->ground_mask()))
        throw Error("reference set must consist of ground constants");
    Mask rq = qualify(*sys_, R, opt_.reach_mode);
    return fixpoint().b_equal(rq, p, q);
}

}  // namespace bpa
