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

#include <cstdint>
#include <string>
#include <vector>

#include "bpa/oracle.hpp"
#include "bpa/refine.hpp"
#include "bpa/system.hpp"

namespace bpa {

struct GenParams {
    int num_constants = 4;
    int num_rules = 8;
    int max_rhs_len = 3;
    double ground_frac = 0.5;
    double silent_frac = 0.3;
    std::uint64_t seed = 0;
};

/// Deterministic in the seed; the result always passes validate_normed
/// and its ground set matches the requested fraction (rounded).
System generate_system(const GenParams& params);

struct FuzzOptions {
    GenParams gen;
    int trials = 100;
    int pairs_per_trial = 20;
    std::uint64_t seed = 0;
    OracleCaps caps;
    EngineOptions engine;
    bool check_properties = false;
    std::string repro_dir;  // empty: no reproducer files
};

struct FuzzReport {
    int trials_run = 0;
    int queries = 0;
    int agreements = 0;
    int unknowns = 0;
    std::vector<std::string> mismatches;
    std::vector<std::string> errors;        // per-trial engine/oracle errors
    std::vector<std::string> prop_failures;

    bool clean() const { return mismatches.empty() && prop_failures.empty(); }
};

/// Differential run of the engine against the brute-force oracle, with
/// the optional invariant suite from the acceptance criteria.
FuzzReport fuzz_compare(const FuzzOptions& options);

/// Invariant checks over one engine run (base validity per iteration,
/// monotonicity of Id/Pr/Rd, refinement-chain inclusion, norm agreement
/// at the fixpoint).  Returns human-readable failures.
std::vector<std::string> check_engine_properties(Engine& engine,
                                                 std::uint64_t sample_seed);

/// Norm laws (additivity, semantic <= strong) on sampled processes.
std::vector<std::string> check_norm_laws(Engine& engine, int samples,
                                         std::uint64_t seed);

}  // namespace bpa
