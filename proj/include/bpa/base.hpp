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
#include <optional>
#include <string>
#include <vector>

#include "bpa/relativization.hpp"
#include "bpa/system.hpp"

namespace bpa {

/// Identity of a block: its reference set and canonical least member.
/// Blocks with equal members but different reference sets are distinct.
struct BlockKey {
    Mask ref;
    int rep;
    bool operator==(const BlockKey&) const = default;
    auto operator<=>(const BlockKey&) const = default;
};

/// A string of prime blocks, written head-left like processes.  In a
/// chain-consistent string the rightmost ref equals the owning slice's
/// reference set and each next ref is the rd of the block before it.
using BlockString = std::vector<BlockKey>;

enum class BlockKind { Untreated, Prime, Composite };

struct BlockEntry {
    Mask members = 0;
    int rank = 0;        // position in the <_R order
    int treat_seq = -1;  // treatment order within one construction
    BlockKind kind = BlockKind::Untreated;
    Mask rd = 0;         // primes only
    BlockString dc;      // composites only
    nat128 norm = 0;
    bool norm_set = false;
};

struct Slice {
    Mask ref;                       // admissible reference set
    std::map<int, BlockEntry> blocks;  // keyed by representative
    std::vector<int> rep_of;        // constant -> representative, -1 in R
};

struct ExpansionCaps {
    std::size_t dc_expansion = 1000000;  // blocks touched per dcmp
};

/// A decomposition base: an Id map over all qualified reference sets
/// plus a slice per admissible set.  Queries for a non-admissible R are
/// redirected through Id.  Immutable once the engine publishes it; the
/// engine itself mutates entries while treating blocks.
class Base {
public:
    Base(const System& sys, ExpansionCaps caps = {}) : sys_(&sys), caps_(caps) {}

    const System& system() const { return *sys_; }

    std::map<Mask, Mask>& id_map() { return id_; }
    const std::map<Mask, Mask>& id_map() const { return id_; }
    std::map<Mask, Slice>& slices() { return slices_; }
    const std::map<Mask, Slice>& slices() const { return slices_; }

    /// Id of a qualified reference set; throws MissingSliceError.
    Mask id_of(Mask R) const;
    bool has_ref(Mask R) const { return id_.count(R) != 0; }
    const Slice& slice(Mask R) const;  // follows Id redirection
    const BlockEntry& entry(const BlockKey& k) const;

    /// Decomposition; nullopt when the reduction runs into a block the
    /// engine has not treated yet (possible only mid-construction).
    std::optional<BlockString> dcmp_partial(Mask R, const Process& p) const;
    BlockString dcmp(Mask R, const Process& p) const;

    bool b_equal(Mask R, const Process& p, const Process& q) const {
        return dcmp(R, p) == dcmp(R, q);
    }
    /// Like b_equal but false when either side is not yet reducible.
    bool b_equal_partial(Mask R, const Process& p, const Process& q) const;

    /// Fold of rd along the decomposition chain of p.
    Mask rd_of_process(Mask R, const Process& p) const;

    /// Sum of block norms over the decomposition (Eq.-style additivity).
    nat128 semantic_norm(Mask R, const Process& p) const;
    std::optional<nat128> semantic_norm_partial(Mask R, const Process& p) const;

    /// Structural-constraint report; empty means valid.
    std::vector<std::string> validate() const;

    /// Structural equality on Id maps and slice contents (kind/rd/dc).
    bool structurally_equal(const Base& other) const;

    std::string format_block(const BlockKey& k) const;
    std::string format_block_string(const BlockString& s) const;

private:
    const System* sys_;
    ExpansionCaps caps_;
    std::map<Mask, Mask> id_;
    std::map<Mask, Slice> slices_;
};

}  // namespace bpa
