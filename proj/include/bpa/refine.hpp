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

#include <optional>
#include <string>
#include <vector>

#include "bpa/base.hpp"
#include "bpa/relativization.hpp"
#include "bpa/system.hpp"

namespace bpa {

/// How the Id sets are recomputed each iteration.  Figure is the
/// default removal-sweep procedure; Candidate keeps every constant that
/// passes the per-constant matching conditions (the greatest filter).
/// The two must agree on well-behaved inputs; both are exposed so the
/// agreement is testable.
enum class IdMode { Figure, Candidate };

struct EngineOptions {
    IdMode id_mode = IdMode::Figure;
    ReachMode reach_mode = ReachMode::Mutual;
    std::uint64_t iter_cap = 10000;
    std::uint64_t slice_cap = 1u << 16;
    nat128 m_cap = 0;  // 0: derived as 2 * max strong norm
    ExpansionCaps exp_caps;

    /// Defaults with BPA_ITER_CAP / BPA_SLICE_CAP applied.
    static EngineOptions from_env();
};

struct IterationTrace {
    std::vector<Base> bases;  // [0] = initial, then one per construction
    int constructions = 0;
    bool converged = false;
    std::vector<std::string> notes;  // deferral events etc.
};

/// The refinement engine: builds the initial base and iterates base
/// construction until the fixpoint, then answers equivalence queries.
class Engine {
public:
    explicit Engine(const System& sys, EngineOptions opt = {});

    const System& system() const { return *sys_; }
    const NormTable& norms() const { return norms_; }
    RelCache& cache() { return cache_; }
    const std::vector<Mask>& qualified_sets() const { return qualified_; }

    Base initial_base();

    /// One Id recomputation for a qualified R against the old base D.
    Mask computing_id(const Base& D, Mask R);

    /// Rd of a freshly classified prime block, against the old base D.
    Mask computing_rd(const Base& D, Mask R, int rep);

    /// Expansion check of constant X against a candidate decomposition
    /// at level m; B is the partially constructed base.
    bool expand(const Base& B, const Base& D, Mask R, int X,
                const BlockString& cand, nat128 m);

    /// Candidates from decreasing witnesses (the first possibility).
    std::vector<BlockString> enumerate_candidates(const Base& B, Mask R,
                                                  int X, nat128 m);

    Base construct_new_base(const Base& D,
                            std::vector<std::string>* notes = nullptr);

    /// Iterate to the fixpoint (cached after the first call).
    const IterationTrace& compute_fixpoint();
    const Base& fixpoint() { return compute_fixpoint().bases.back(); }

    /// ≃_R query; R ⊆ C_G is canonicalized via qualify first.
    bool decide(Mask R, const Process& p, const Process& q);

private:
    const System* sys_;
    EngineOptions opt_;
    NormTable norms_;
    RelCache cache_;
    std::vector<Mask> qualified_;
    std::optional<IterationTrace> trace_;

    nat128 effective_m_cap() const;
};

}  // namespace bpa
