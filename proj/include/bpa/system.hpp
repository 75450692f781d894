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

#include <compare>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bpa/common.hpp"

namespace bpa {

/// A process is a finite string of constant indices, head (active
/// constant) at the left.  The empty vector is the empty process.
struct Process {
    std::vector<int> syms;

    Process() = default;
    explicit Process(std::vector<int> s) : syms(std::move(s)) {}
    static Process single(int c) { return Process{std::vector<int>{c}}; }

    bool empty() const { return syms.empty(); }
    std::size_t size() const { return syms.size(); }
    int head() const { return syms.front(); }

    Process concat(const Process& o) const {
        Process r = *this;
        r.syms.insert(r.syms.end(), o.syms.begin(), o.syms.end());
        return r;
    }
    /// Suffix starting at position i (head-side positions first).
    Process suffix_from(std::size_t i) const {
        return Process{std::vector<int>(syms.begin() + static_cast<long>(i),
                                        syms.end())};
    }

    bool operator==(const Process&) const = default;
    auto operator<=>(const Process&) const = default;
};

struct Rule {
    int lhs;
    int action;  // 0 is the silent action
    Process rhs;
    bool operator==(const Rule&) const = default;
};

constexpr int kTau = 0;

/// A normed BPA system: constants, actions (index 0 = tau), head
/// rewriting rules.  Immutable once built.
class System {
public:
    /// Parse the line-based file format (see README).  Throws ParseError.
    static System parse(const std::string& text);

    /// Canonical printer; parse(print()) reproduces the system.
    std::string print() const;

    int num_constants() const { return static_cast<int>(const_names_.size()); }
    const std::string& constant_name(int c) const { return const_names_[c]; }
    const std::string& action_name(int a) const { return action_names_[a]; }
    int num_actions() const { return static_cast<int>(action_names_.size()); }

    /// Declaration index of a named constant, -1 if unknown.
    int constant_index(const std::string& name) const;

    const std::vector<Rule>& rules() const { return rules_; }
    /// Indices into rules(), in declaration order, for one constant.
    const std::vector<int>& rules_of(int c) const { return rules_of_[c]; }

    Mask ground_mask() const { return ground_; }
    Mask all_mask() const {
        int n = num_constants();
        return n == 64 ? ~Mask{0} : (mask_bit(n) - 1);
    }
    bool is_ground_const(int c) const { return mask_has(ground_, c); }
    bool is_ground(const Process& p) const {
        for (int c : p.syms)
            if (!mask_has(ground_, c)) return false;
        return true;
    }

    /// All one-step successors of p, in rule declaration order.
    std::vector<std::pair<int, Process>> step(const Process& p) const;

    /// Process literal: dot-separated names, or "eps".
    Process parse_process(const std::string& text) const;
    std::string format_process(const Process& p) const;

    /// Reference set literal: comma-separated names, "" or "{}" = empty.
    Mask parse_ref_set(const std::string& text) const;
    std::string format_ref_set(Mask m) const;  // "{B,C}" style

    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    std::vector<std::string> const_names_;
    std::map<std::string, int> const_index_;
    std::vector<std::string> action_names_;  // [0] == "tau"
    std::vector<Rule> rules_;
    std::vector<std::vector<int>> rules_of_;
    Mask ground_ = 0;
    std::vector<std::string> warnings_;

    void finalize();  // rules_of_, ground fixpoint
};

/// Per-constant strong and weak norms.  Only valid for normed systems.
struct NormTable {
    std::vector<nat128> strong;
    std::vector<nat128> weak;

    nat128 strong_of(const Process& p) const {
        nat128 s = 0;
        for (int c : p.syms) s = nat_add(s, strong[c]);
        return s;
    }
    nat128 weak_of(const Process& p) const {
        nat128 s = 0;
        for (int c : p.syms) s = nat_add(s, weak[c]);
        return s;
    }
};

/// Throws UnnormedError listing the constants with infinite strong
/// norm; otherwise returns the norm table.
NormTable validate_normed(const System& sys);

}  // namespace bpa
