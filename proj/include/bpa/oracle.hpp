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
#include <vector>

#include "bpa/relativization.hpp"
#include "bpa/system.hpp"

namespace bpa {

struct OracleCaps {
    std::size_t max_states = 2000;
    std::size_t max_len = 12;
};

/// A finite fragment of the R-transition system, used by the
/// brute-force referee.  A state whose expanded flag is false was
/// interned but not explored (a cap was hit); its edge list is empty
/// and it is treated as "could behave like anything" by the gfp, which
/// keeps non-equivalence verdicts sound on truncated fragments.
struct FiniteLts {
    std::vector<Process> states;  // R-normal forms; index 0..n-1
    std::map<Process, int> index;
    std::vector<std::vector<std::pair<int, int>>> edges;  // (action, dst)
    std::vector<bool> ground;
    std::vector<bool> expanded;

    bool closed() const {
        for (bool e : expanded)
            if (!e) return false;
        return true;
    }
};

/// BFS closure of the seeds under R-transitions; nullopt when a cap is
/// hit (cap_reason then says which one).
std::optional<FiniteLts> explore_fragment(const RelContext& ctx,
                                          const std::vector<Process>& seeds,
                                          const OracleCaps& caps,
                                          std::string* cap_reason = nullptr);

/// Like explore_fragment, but on a cap the partial graph is returned
/// with the unexplored states left unexpanded.
FiniteLts explore_partial(const RelContext& ctx,
                          const std::vector<Process>& seeds,
                          const OracleCaps& caps);

/// Greatest fixpoint of the three R-bisimulation clauses; returns a
/// class id per state.  Unexpanded states defend every challenge, so
/// two states in different classes are non-equivalent in the full
/// system; equal classes prove equivalence only on a closed fragment.
std::vector<int> relative_bisim_finite(const FiniteLts& lts);

enum class Verdict { True, False, Unknown };

Verdict oracle_decide(RelCache& cache, Mask R, const Process& p,
                      const Process& q, const OracleCaps& caps = {});

/// Re-checks all three R-bisimulation clauses on a finished class
/// assignment (ground preservation, silent, visible).
bool verify_r_bisim(const FiniteLts& lts, const std::vector<int>& cls);

/// Checks that on every silent chain s ⟹ s' ⟹ s'' with s ~ s'' the
/// middle state is equivalent to the ends.
bool verify_computation_lemma(const FiniteLts& lts,
                              const std::vector<int>& cls);

}  // namespace bpa
