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

#pragma once

#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "bpa/system.hpp"

namespace bpa {

/// How to read "mutually silently reachable with ..." when forming
/// blocks and checking qualification.  Mutual (both directions) is the
/// default; the symmetric-closure reading exists for experiments only.
enum class ReachMode { Mutual, SymmetricClosure };

struct DerivedTransition {
    int action;
    Process target;  // already in R-normal form
    bool operator==(const DerivedTransition&) const = default;
};

/// All saturation tables for one (system, R): relative reachability,
/// qualification, blocks with their order, propagating constants and
/// derived block transitions.  Pure function of its inputs.
class RelContext {
public:
    RelContext(const System& sys, Mask R, ReachMode mode = ReachMode::Mutual);

    const System& system() const { return *sys_; }
    Mask ref_set() const { return R_; }
    bool qualified() const { return qualified_; }

    /// Whether standalone constant c silently R-reaches standalone z.
    bool reaches(int c, int z) const { return mask_has(creach_[c], z); }
    Mask reach_set(int c) const { return creach_[c]; }
    /// Constants reachable from the empty process (induced by R).
    Mask eps_reach() const { return eps_reach_; }
    /// Whether c, as a standalone process, silently R-erases.
    bool erases(int c) const {
        return mask_has(sys_->ground_mask() | R_, c);
    }

    Process rnf(const Process& p) const;
    bool r_equal(const Process& p, const Process& q) const {
        return rnf(p) == rnf(q);
    }
    /// Constants Z with p ⟹_R Z (p arbitrary; normalized internally).
    Mask string_reach_set(const Process& p) const;
    /// Whether p ⟹_R ε, i.e. all constants of p are ground.
    bool string_erases(const Process& p) const;

    /// One-step R-transitions from an R-normal form (the empty process
    /// moves by the rules of R's constants).  Deduplicated, rule order.
    std::vector<std::pair<int, Process>> r_transitions(const Process& p) const;

    struct BlockData {
        Mask members;
        int rep;       // least member, declaration index
        int rank;      // dense from 0; rank(target) < rank(source)
        Mask propagating;
        std::vector<DerivedTransition> derived;
    };

    int block_count() const { return static_cast<int>(blocks_.size()); }
    const BlockData& block(int b) const { return blocks_[b]; }
    /// Block index of a constant outside R; -1 for R-members.
    int block_of(int c) const { return block_of_[c]; }

    /// Constants appearing in all-ground strings plainly silently
    /// reachable from c (used by the removal sweeps of the refinement
    /// procedures; plain reachability, so paths through R members are
    /// kept).
    Mask ground_context_reach(int c) const { return gc_[c]; }

private:
    const System* sys_;
    Mask R_;
    ReachMode mode_;
    Mask ground_;
    bool qualified_ = true;

    std::vector<Mask> creach_;
    Mask eps_reach_ = 0;
    std::vector<Mask> grh_;  // ground heads: c ⟹ Y.ζ (plain), Y.ζ ground
    std::vector<Mask> gc_;   // constants of ground strings c ⟹ ζ (plain)

    std::vector<BlockData> blocks_;
    std::vector<int> block_of_;

    void saturate_reach();
    void saturate_ground_tables();
    void build_blocks();
    void build_propagating();
    void build_derived();

    Mask raw_string_reach(const Process& rnf_str) const;
};

/// Least qualified superset of R (adds violating constants until no
/// constant outside the set is mutually silently reachable with ε).
Mask qualify(const System& sys, Mask R, ReachMode mode = ReachMode::Mutual);

/// Shared per-(system, R) context store.
class RelCache {
public:
    explicit RelCache(const System& sys, ReachMode mode = ReachMode::Mutual)
        : sys_(&sys), mode_(mode) {}
    const RelContext& get(Mask R);

private:
    const System* sys_;
    ReachMode mode_;
    std::map<Mask, std::unique_ptr<RelContext>> store_;
};

}  // namespace bpa
