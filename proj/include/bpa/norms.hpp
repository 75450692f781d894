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

#include <vector>

#include "bpa/base.hpp"
#include "bpa/relativization.hpp"

namespace bpa {

struct WitnessStep {
    int action;
    Process target;     // R-normal form reached by this step
    bool decreasing;    // lowers the semantic norm by exactly one
};

/// A concrete path of shape "norm-preserving silent stretches separated
/// by exactly ‖p‖ decreasing transitions", ending silently in ε.
/// Throws NormUnavailableError / CapExceededError when no witness is
/// found within the search cap (which would indicate an engine bug on
/// a published fixpoint base).
std::vector<WitnessStep> witness_path(const Base& base, RelCache& cache,
                                      Mask R, const Process& p,
                                      std::size_t state_cap = 10000);

}  // namespace bpa
