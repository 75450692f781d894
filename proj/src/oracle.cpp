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

#include "bpa/oracle.hpp"

#include <algorithm>
#include <deque>

namespace bpa {

namespace {

/// Shared BFS; returns false as soon as a cap is hit.  On failure the
/// partially built graph is still usable: every state whose edges were
/// not fully recorded is left unexpanded.
bool explore_into(const RelContext& ctx, const std::vector<Process>& seeds,
                  const OracleCaps& caps, FiniteLts& lts,
                  std::string* cap_reason) {
    std::deque<int> queue;
    auto intern = [&](const Process& p) -> std::optional<int> {
        auto it = lts.index.find(p);
        if (it != lts.index.end()) return it->second;
        if (p.size() > caps.max_len) {
            if (cap_reason) *cap_reason = "length cap";
            return std::nullopt;
        }
        if (lts.states.size() >= caps.max_states) {
            if (cap_reason) *cap_reason = "state cap";
            return std::nullopt;
        }
        int id = static_cast<int>(lts.states.size());
        lts.states.push_back(p);
        lts.index[p] = id;
        lts.edges.emplace_back();
        lts.ground.push_back(ctx.system().is_ground(p));
        lts.expanded.push_back(false);
        queue.push_back(id);
        return id;
    };

    for (const Process& s : seeds)
        if (!intern(ctx.rnf(s))) return false;
    if (!intern(Process{})) return false;

    while (!queue.empty()) {
        int id = queue.front();
        queue.pop_front();
        Process src = lts.states[id];
        for (auto& [act, tgt] : ctx.r_transitions(src)) {
            auto t = intern(tgt);
            if (!t) {
                lts.edges[id].clear();
                return false;
            }
            lts.edges[id].emplace_back(act, *t);
        }
        lts.expanded[id] = true;
    }
    return true;
}

}  // namespace

std::optional<FiniteLts> explore_fragment(const RelContext& ctx,
                                          const std::vector<Process>& seeds,
                                          const OracleCaps& caps,
                                          std::string* cap_reason) {
    FiniteLts lts;
    if (!explore_into(ctx, seeds, caps, lts, cap_reason)) return std::nullopt;
    return lts;
}

FiniteLts explore_partial(const RelContext& ctx,
                          const std::vector<Process>& seeds,
                          const OracleCaps& caps) {
    FiniteLts lts;
    explore_into(ctx, seeds, caps, lts, nullptr);
    return lts;
}

namespace {

/// States silently reachable from j through states related to the
/// challenger i (the matching stretch of the silent and visible
/// clauses), j itself included.
std::vector<int> class_stretch(const FiniteLts& lts,
                               const std::vector<std::vector<bool>>& rel,
                               int i, int j) {
    std::vector<int> out{j};
    std::vector<bool> seen(lts.states.size(), false);
    seen[j] = true;
    std::deque<int> queue{j};
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (auto [act, v] : lts.edges[u]) {
            if (act != kTau || seen[v] || !rel[i][v]) continue;
            seen[v] = true;
            out.push_back(v);
            queue.push_back(v);
        }
    }
    return out;
}

bool matches(const FiniteLts& lts, const std::vector<std::vector<bool>>& rel,
             int i, int j) {
    // An unexpanded state issues no challenges (its edges are unknown).
    if (lts.edges[i].empty()) return true;
    std::vector<int> stretch = class_stretch(lts, rel, i, j);
    for (auto [act, ip] : lts.edges[i]) {
        // A silent move whose target is still related to j needs no
        // response (j may stay put).
        if (act == kTau && rel[ip][j]) continue;
        bool ok = false;
        for (int t : stretch) {
            // An unexpanded stretch state could answer anything.
            if (!lts.expanded[t]) {
                ok = true;
                break;
            }
            for (auto [bact, jp] : lts.edges[t]) {
                if (bact != act || !rel[ip][jp]) continue;
                ok = true;
                break;
            }
            if (ok) break;
        }
        if (!ok) return false;
    }
    return true;
}

}  // namespace

std::vector<int> relative_bisim_finite(const FiniteLts& lts) {
    int n = static_cast<int>(lts.states.size());
    std::vector<std::vector<bool>> rel(n, std::vector<bool>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            rel[i][j] = (lts.ground[i] == lts.ground[j]);

    bool changed = true;
    while (changed) {
        changed = false;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (!rel[i][j]) continue;
                if (!matches(lts, rel, i, j) || !matches(lts, rel, j, i)) {
                    rel[i][j] = rel[j][i] = false;
                    changed = true;
                }
            }
        }
    }

    std::vector<int> cls(n, -1);
    int next = 0;
    for (int i = 0; i < n; ++i) {
        if (cls[i] >= 0) continue;
        cls[i] = next;
        for (int j = i + 1; j < n; ++j)
            if (rel[i][j]) cls[j] = next;
        ++next;
    }
    return cls;
}

bool verify_r_bisim(const FiniteLts& lts, const std::vector<int>& cls) {
    int n = static_cast<int>(lts.states.size());
    std::vector<std::vector<bool>> rel(n, std::vector<bool>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) rel[i][j] = (cls[i] == cls[j]);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (!rel[i][j]) continue;
            if (lts.ground[i] != lts.ground[j]) return false;
            if (!matches(lts, rel, i, j)) return false;
        }
    return true;
}

bool verify_computation_lemma(const FiniteLts& lts,
                              const std::vector<int>& cls) {
    int n = static_cast<int>(lts.states.size());
    // Plain silent reachability closure inside the fragment.
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i) reach[i][i] = true;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int i = 0; i < n; ++i)
            for (auto [act, j] : lts.edges[i]) {
                if (act != kTau) continue;
                for (int k = 0; k < n; ++k)
                    if (reach[j][k] && !reach[i][k]) {
                        reach[i][k] = true;
                        changed = true;
                    }
            }
    }
    for (int s = 0; s < n; ++s)
        for (int m = 0; m < n; ++m) {
            if (!reach[s][m]) continue;
            for (int e = 0; e < n; ++e) {
                if (!reach[m][e] || cls[s] != cls[e]) continue;
                if (cls[s] != cls[m]) return false;
            }
        }
    return true;
}

namespace {

Verdict decide_on_fragment(const RelContext& ctx, const Process& pn,
                           const Process& qn, const OracleCaps& caps) {
    FiniteLts lts = explore_partial(ctx, {pn, qn}, caps);
    auto ia = lts.index.find(pn);
    auto ib = lts.index.find(qn);
    if (ia == lts.index.end() || ib == lts.index.end())
        return Verdict::Unknown;
    auto cls = relative_bisim_finite(lts);
    if (cls[ia->second] != cls[ib->second]) return Verdict::False;
    return lts.closed() ? Verdict::True : Verdict::Unknown;
}

}  // namespace

Verdict oracle_decide(RelCache& cache, Mask R, const Process& p,
                      const Process& q, const OracleCaps& caps) {
    const RelContext& ctx = cache.get(R);
    if (!ctx.qualified())
        throw Error("oracle requires a qualified reference set");
    Process pn = ctx.rnf(p), qn = ctx.rnf(q);
    if (pn == qn) return Verdict::True;
    // Both verdicts on a truncated fragment stay valid on any larger
    // one, so start small and escalate only while the answer is open.
    for (std::size_t n = 256; n < caps.max_states; n *= 4) {
        Verdict v = decide_on_fragment(ctx, pn, qn, {n, caps.max_len});
        if (v != Verdict::Unknown) return v;
    }
    return decide_on_fragment(ctx, pn, qn, caps);
}

}  // namespace bpa
