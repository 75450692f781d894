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

#include <string>
#include <vector>

#include "bpa/refine.hpp"

namespace bpa {

/// One TSV table per base: block, ref-set, treatment order, norm,
/// kind (P/C), rd, dc.  Slices in ascending mask order, blocks by
/// representative.  Byte-stable.
std::string dump_base(const Base& b);

/// The distinct bases of a converged run: the initial base plus each
/// construction that changed something.
std::vector<std::string> iteration_tables(const IterationTrace& tr);

std::string summary_line(const IterationTrace& tr);

}  // namespace bpa
