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

#include "bpa/norms.hpp"

#include <deque>
#include <map>

namespace bpa {

namespace {

// BFS from `from` through silent R-transitions whose targets keep the
// given semantic norm, until a state with a transition dropping the
// norm by one (goal_norm) is found, or -- when goal_eps -- until ε.
// Returns the steps taken, or nothing within the cap.
struct StretchResult {
    std::vector<WitnessStep> steps;
    Process end;
    bool found = false;
};

StretchResult find_stretch(const Base& base, const RelContext& ctx, Mask R,
                           const Process& from, nat128 level, bool to_eps,
                           std::size_t cap) {
    std::map<Process, std::pair<Process, std::pair<int, Process>>> parent;
    std::deque<Process> queue{from};
    std::map<Process, bool> seen;
    seen[from] = true;

    auto path_to = [&](const Process& s) {
        std::vector<WitnessStep> steps;
        Process cur = s;
        while (!(cur == from)) {
            auto& [prev, edge] = parent.at(cur);
            steps.push_back({edge.first, cur, false});
            cur = prev;
        }
        std::reverse(steps.begin(), steps.end());
        return steps;
    };

    while (!queue.empty()) {
        Process s = queue.front();
        queue.pop_front();
        if (to_eps && s.empty()) {
            StretchResult r;
            r.steps = path_to(s);
            r.end = s;
            r.found = true;
            return r;
        }
        for (auto& [act, t] : ctx.r_transitions(s)) {
            auto tn = base.semantic_norm_partial(R, t);
            if (!tn) continue;
            if (!to_eps && *tn + 1 == level) {
                StretchResult r;
                r.steps = path_to(s);
                r.steps.push_back({act, t, true});
                r.end = t;
                r.found = true;
                return r;
            }
            if (act != kTau || *tn != level) continue;
            if (seen.count(t)) continue;
            if (seen.size() >= cap)
                throw CapExceededError("witness search cap exceeded");
            seen[t] = true;
            parent[t] = {s, {act, t}};
            queue.push_back(t);
        }
    }
    return {};
}

}  // namespace

std::vector<WitnessStep> witness_path(const Base& base, RelCache& cache,
                                      Mask R, const Process& p,
                                      std::size_t state_cap) {
    Mask rq = qualify(base.system(), R);
    const RelContext& ctx = cache.get(rq);
    Process cur = ctx.rnf(p);
    nat128 level = base.semantic_norm(rq, cur);

    std::vector<WitnessStep> out;
    while (level > 0) {
        StretchResult r =
            find_stretch(base, ctx, rq, cur, level, false, state_cap);
        if (!r.found)
            throw NormUnavailableError();
        out.insert(out.end(), r.steps.begin(), r.steps.end());
        cur = r.end;
        level -= 1;
    }
    // Trailing silent stretch at norm zero down to ε.
    StretchResult r = find_stretch(base, ctx, rq, cur, 0, true, state_cap);
    if (!r.found) throw NormUnavailableError();
    out.insert(out.end(), r.steps.begin(), r.steps.end());
    return out;
}

}  // namespace bpa
