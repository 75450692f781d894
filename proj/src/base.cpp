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

#include "bpa/base.hpp"

#include <algorithm>

namespace bpa {

Mask Base::id_of(Mask R) const {
    auto it = id_.find(R);
    if (it == id_.end())
        throw MissingSliceError(sys_->format_ref_set(R));
    return it->second;
}

const Slice& Base::slice(Mask R) const {
    Mask a = id_of(R);
    auto it = slices_.find(a);
    if (it == slices_.end())
        throw MissingSliceError(sys_->format_ref_set(a));
    return it->second;
}

const BlockEntry& Base::entry(const BlockKey& k) const {
    auto sit = slices_.find(k.ref);
    if (sit == slices_.end())
        throw MissingSliceError(sys_->format_ref_set(k.ref));
    auto bit = sit->second.blocks.find(k.rep);
    if (bit == sit->second.blocks.end())
        throw Error("internal: unknown block " + format_block(k));
    return bit->second;
}

std::optional<BlockString> Base::dcmp_partial(Mask R, const Process& p) const {
    // Right-to-left reduction: drop Id constants, lift a constant into
    // its block, expand composites, and continue the prefix under the
    // rd of each prime found.  Deterministic by construction.
    struct Item {
        bool is_block;
        int sym;
        BlockKey key;
    };
    std::vector<Item> items;
    items.reserve(p.size());
    for (int c : p.syms) items.push_back({false, c, {}});

    BlockString out;  // built right-to-left, reversed at the end
    Mask a = id_of(R);
    std::size_t steps = 0;

    while (!items.empty()) {
        if (++steps > caps_.dc_expansion)
            throw CapExceededError("dcmp expansion cap exceeded");
        Item it = items.back();
        items.pop_back();
        BlockKey k;
        if (!it.is_block) {
            if (mask_has(a, it.sym)) continue;
            const Slice& sl = slices_.at(a);
            k = BlockKey{a, sl.rep_of[it.sym]};
        } else {
            k = it.key;
            if (k.ref != a)
                throw Error("internal: chain-inconsistent block string");
        }
        const BlockEntry& e = entry(k);
        if (e.kind == BlockKind::Untreated) return std::nullopt;
        if (e.kind == BlockKind::Composite) {
            for (const BlockKey& dk : e.dc) items.push_back({true, 0, dk});
            continue;
        }
        out.push_back(k);
        a = e.rd;
        if (!slices_.count(a))
            throw MissingSliceError(sys_->format_ref_set(a));
    }
    std::reverse(out.begin(), out.end());
    return out;
}

BlockString Base::dcmp(Mask R, const Process& p) const {
    auto r = dcmp_partial(R, p);
    if (!r) throw NormUnavailableError();
    return *r;
}

bool Base::b_equal_partial(Mask R, const Process& p, const Process& q) const {
    auto a = dcmp_partial(R, p);
    if (!a) return false;
    auto b = dcmp_partial(R, q);
    return b && *a == *b;
}

Mask Base::rd_of_process(Mask R, const Process& p) const {
    BlockString d = dcmp(R, p);
    Mask s = id_of(R);
    for (auto it = d.rbegin(); it != d.rend(); ++it) s = entry(*it).rd;
    return s;
}

std::optional<nat128> Base::semantic_norm_partial(Mask R,
                                                 const Process& p) const {
    auto d = dcmp_partial(R, p);
    if (!d) return std::nullopt;
    nat128 sum = 0;
    for (const BlockKey& k : *d) {
        const BlockEntry& e = entry(k);
        if (!e.norm_set) return std::nullopt;
        sum = nat_add(sum, e.norm);
    }
    return sum;
}

nat128 Base::semantic_norm(Mask R, const Process& p) const {
    auto n = semantic_norm_partial(R, p);
    if (!n) throw NormUnavailableError();
    return *n;
}

std::vector<std::string> Base::validate() const {
    std::vector<std::string> bad;
    Mask cg = sys_->ground_mask();
    auto fmt = [&](Mask m) { return sys_->format_ref_set(m); };

    for (const auto& [r, idv] : id_) {
        if (!mask_subset(r, idv) || !mask_subset(idv, cg))
            bad.push_back("(1) Id violates R <= Id <= C_G at " + fmt(r));
        auto it = id_.find(idv);
        if (it == id_.end() || it->second != idv)
            bad.push_back("(2) Id not idempotent at " + fmt(r));
        if (!slices_.count(idv))
            bad.push_back("(3) no slice for Id of " + fmt(r));
    }
    for (const auto& [r, sl] : slices_) {
        auto it = id_.find(r);
        if (it == id_.end() || it->second != r)
            bad.push_back("slice for non-admissible set " + fmt(r));
    }
    // Monotonicity across slices, capped for very large Id maps.
    if (id_.size() <= 512) {
        for (const auto& [r1, i1] : id_)
            for (const auto& [r2, i2] : id_) {
                if (!mask_subset(r1, r2)) continue;
                if (!mask_subset(i1, i2))
                    bad.push_back("(2) Id not monotone: " + fmt(r1) +
                                  " vs " + fmt(r2));
                if (mask_subset(r2, i1) && i2 != i1)
                    bad.push_back("(2) Id not stable between " + fmt(r1) +
                                  " and " + fmt(r2));
            }
    }
    for (const auto& [r, sl] : slices_) {
        Mask covered = 0;
        for (const auto& [rep, e] : sl.blocks) {
            if (e.members == 0 || (covered & e.members) != 0)
                bad.push_back("(4) blocks do not partition C at " + fmt(r));
            covered |= e.members;
            if (rep != __builtin_ctzll(e.members))
                bad.push_back("block rep not least member at " + fmt(r));
            if (e.kind == BlockKind::Untreated) {
                bad.push_back("(4) unclassified block at " + fmt(r));
                continue;
            }
            if (e.kind == BlockKind::Prime) {
                auto it = id_.find(e.rd);
                if (it == id_.end() || it->second != e.rd)
                    bad.push_back("(5) rd target not admissible at " +
                                  fmt(r) + " block " +
                                  sys_->constant_name(rep));
            } else {
                if (e.dc.empty())
                    bad.push_back("empty dc at " + fmt(r));
                Mask chain = r;
                for (auto it2 = e.dc.rbegin(); it2 != e.dc.rend(); ++it2) {
                    if (it2->ref != chain) {
                        bad.push_back("dc chain-inconsistent at " + fmt(r));
                        break;
                    }
                    auto sit = slices_.find(it2->ref);
                    if (sit == slices_.end() ||
                        !sit->second.blocks.count(it2->rep) ||
                        sit->second.blocks.at(it2->rep).kind !=
                            BlockKind::Prime) {
                        bad.push_back("dc element not a prime at " + fmt(r));
                        break;
                    }
                    chain = sit->second.blocks.at(it2->rep).rd;
                }
            }
        }
        if (covered != (sys_->all_mask() & ~r))
            bad.push_back("(4) blocks do not cover C minus R at " + fmt(r));
    }
    return bad;
}

bool Base::structurally_equal(const Base& other) const {
    if (id_ != other.id_) return false;
    if (slices_.size() != other.slices_.size()) return false;
    for (const auto& [r, sl] : slices_) {
        auto it = other.slices_.find(r);
        if (it == other.slices_.end()) return false;
        const Slice& so = it->second;
        if (sl.blocks.size() != so.blocks.size()) return false;
        for (const auto& [rep, e] : sl.blocks) {
            auto bit = so.blocks.find(rep);
            if (bit == so.blocks.end()) return false;
            const BlockEntry& eo = bit->second;
            if (e.kind != eo.kind) return false;
            if (e.kind == BlockKind::Prime && e.rd != eo.rd) return false;
            if (e.kind == BlockKind::Composite && e.dc != eo.dc) return false;
        }
    }
    return true;
}

std::string Base::format_block(const BlockKey& k) const {
    return "[" + sys_->constant_name(k.rep) + "]" +
           sys_->format_ref_set(k.ref);
}

std::string Base::format_block_string(const BlockString& s) const {
    if (s.empty()) return "eps";
    std::string out;
    for (const BlockKey& k : s) out += format_block(k);
    return out;
}

}  // namespace bpa
