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

#include "bpa/report.hpp"

#include <sstream>

namespace bpa {

std::string dump_base(const Base& b) {
    const System& sys = b.system();
    std::ostringstream out;
    out << "block\tref\tord\tnorm\tkind\trd\tdc\n";
    for (const auto& [r, sl] : b.slices()) {
        for (const auto& [rep, e] : sl.blocks) {
            out << b.format_block(BlockKey{r, rep}) << "\t"
                << sys.format_ref_set(r) << "\t" << e.treat_seq << "\t"
                << (e.norm_set ? nat_str(e.norm) : std::string("?")) << "\t";
            if (e.kind == BlockKind::Prime)
                out << "P\t" << sys.format_ref_set(e.rd) << "\t-";
            else if (e.kind == BlockKind::Composite)
                out << "C\t-\t" << b.format_block_string(e.dc);
            else
                out << "?\t-\t-";
            out << "\n";
        }
    }
    return out.str();
}

std::vector<std::string> iteration_tables(const IterationTrace& tr) {
    std::vector<std::string> out;
    std::size_t count = tr.bases.size();
    if (tr.converged && count > 1) --count;  // last base repeats the previous
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(dump_base(tr.bases[i]));
    return out;
}

std::string summary_line(const IterationTrace& tr) {
    const Base& fix = tr.bases.back();
    std::size_t blocks = 0;
    nat128 max_norm = 0;
    for (const auto& [r, sl] : fix.slices()) {
        blocks += sl.blocks.size();
        for (const auto& [rep, e] : sl.blocks)
            if (e.norm_set && e.norm > max_norm) max_norm = e.norm;
    }
    std::ostringstream out;
    out << "iterations=" << tr.constructions
        << "\tslices=" << fix.slices().size() << "\tblocks=" << blocks
        << "\tmax_norm=" << nat_str(max_norm);
    return out.str();
}

}  // namespace bpa
