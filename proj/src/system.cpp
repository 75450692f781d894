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

#include "bpa/system.hpp"

#include <algorithm>
#include <sstream>

namespace bpa {

namespace {

bool is_name_char(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
           (c >= '0' && c <= '9') || c == '_' || c == '\'';
}

struct Line {
    int no;
    std::string text;
};

std::vector<Line> split_lines(const std::string& text) {
    std::vector<Line> out;
    std::string cur;
    int no = 1;
    for (char c : text) {
        if (c == '\n') {
            out.push_back({no, cur});
            cur.clear();
            ++no;
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back({no, cur});
    return out;
}

std::string strip_comment(const std::string& s) {
    auto pos = s.find('#');
    return pos == std::string::npos ? s : s.substr(0, pos);
}

std::vector<std::pair<int, std::string>> tokenize(const std::string& s) {
    // Returns (column, token) pairs; tokens are whitespace separated.
    std::vector<std::pair<int, std::string>> toks;
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] == ' ' || s[i] == '\t' || s[i] == '\r') {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
        toks.emplace_back(static_cast<int>(i) + 1, s.substr(i, j - i));
        i = j;
    }
    return toks;
}

}  // namespace

System System::parse(const std::string& text) {
    System sys;
    sys.action_names_.push_back("tau");

    enum class Section { None, Rules } section = Section::None;
    bool saw_constants = false;

    for (const Line& ln : split_lines(text)) {
        auto toks = tokenize(strip_comment(ln.text));
        if (toks.empty()) continue;

        if (toks[0].second == "constants:") {
            if (saw_constants)
                throw ParseError(ln.no, toks[0].first,
                                 "duplicate 'constants:' section");
            saw_constants = true;
            for (std::size_t t = 1; t < toks.size(); ++t) {
                const std::string& name = toks[t].second;
                if (name == "eps" || name == "tau")
                    throw ParseError(ln.no, toks[t].first,
                                     "'" + name + "' is reserved");
                for (char c : name)
                    if (!is_name_char(c))
                        throw ParseError(ln.no, toks[t].first,
                                         "bad character in constant name '" +
                                             name + "'");
                if (sys.const_index_.count(name))
                    throw ParseError(ln.no, toks[t].first,
                                     "duplicate constant '" + name + "'");
                if (static_cast<int>(sys.const_names_.size()) >= kMaxConstants)
                    throw ParseError(ln.no, toks[t].first,
                                     "too many constants (cap 64)");
                sys.const_index_[name] =
                    static_cast<int>(sys.const_names_.size());
                sys.const_names_.push_back(name);
            }
            continue;
        }
        if (toks[0].second == "rules:") {
            if (!saw_constants)
                throw ParseError(ln.no, toks[0].first,
                                 "'rules:' before 'constants:'");
            section = Section::Rules;
            continue;
        }
        if (section != Section::Rules)
            throw ParseError(ln.no, toks[0].first,
                             "unexpected content before 'rules:'");

        // A rule line: LHS -act-> RHS
        if (toks.size() != 3)
            throw ParseError(ln.no, toks[0].first,
                             "rule must have shape 'X -a-> Y.Z'");
        int lhs = sys.constant_index(toks[0].second);
        if (lhs < 0)
            throw ParseError(ln.no, toks[0].first,
                             "undeclared constant '" + toks[0].second + "'");
        const std::string& arrow = toks[1].second;
        if (arrow.size() < 4 || arrow.front() != '-' ||
            arrow.substr(arrow.size() - 2) != "->")
            throw ParseError(ln.no, toks[1].first,
                             "bad arrow '" + arrow + "' (want -a->)");
        std::string act = arrow.substr(1, arrow.size() - 3);
        if (act.empty())
            throw ParseError(ln.no, toks[1].first, "empty action name");
        for (char c : act)
            if (!is_name_char(c))
                throw ParseError(ln.no, toks[1].first,
                                 "bad character in action '" + act + "'");
        int act_idx;
        if (act == "tau") {
            act_idx = kTau;
        } else {
            auto it = std::find(sys.action_names_.begin(),
                                sys.action_names_.end(), act);
            if (it == sys.action_names_.end()) {
                act_idx = static_cast<int>(sys.action_names_.size());
                sys.action_names_.push_back(act);
            } else {
                act_idx = static_cast<int>(it - sys.action_names_.begin());
            }
        }
        Process rhs;
        if (toks[2].second != "eps") {
            std::stringstream ss(toks[2].second);
            std::string part;
            int col = toks[2].first;
            while (std::getline(ss, part, '.')) {
                int c = sys.constant_index(part);
                if (c < 0)
                    throw ParseError(ln.no, col,
                                     "undeclared constant '" + part + "'");
                rhs.syms.push_back(c);
                col += static_cast<int>(part.size()) + 1;
            }
            if (rhs.empty())
                throw ParseError(ln.no, toks[2].first, "empty rule RHS");
        }
        Rule r{lhs, act_idx, rhs};
        if (std::find(sys.rules_.begin(), sys.rules_.end(), r) !=
            sys.rules_.end()) {
            sys.warnings_.push_back("duplicate rule dropped at line " +
                                    std::to_string(ln.no));
            continue;
        }
        sys.rules_.push_back(std::move(r));
    }

    if (!saw_constants) throw ParseError(1, 1, "missing 'constants:' section");
    sys.finalize();
    return sys;
}

void System::finalize() {
    rules_of_.assign(const_names_.size(), {});
    for (int i = 0; i < static_cast<int>(rules_.size()); ++i)
        rules_of_[rules_[i].lhs].push_back(i);

    // Ground constants: least fixpoint of "has a silent rule whose RHS
    // is already all ground".
    ground_ = 0;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const Rule& r : rules_) {
            if (r.action != kTau || mask_has(ground_, r.lhs)) continue;
            if (is_ground(r.rhs)) {
                ground_ |= mask_bit(r.lhs);
                changed = true;
            }
        }
    }
}

std::string System::print() const {
    std::string out = "constants:";
    for (const auto& n : const_names_) out += " " + n;
    out += "\nrules:\n";
    for (const Rule& r : rules_) {
        out += const_names_[r.lhs] + " -" + action_names_[r.action] + "-> " +
               format_process(r.rhs) + "\n";
    }
    return out;
}

int System::constant_index(const std::string& name) const {
    auto it = const_index_.find(name);
    return it == const_index_.end() ? -1 : it->second;
}

std::vector<std::pair<int, Process>> System::step(const Process& p) const {
    std::vector<std::pair<int, Process>> out;
    if (p.empty()) return out;
    Process rest = p.suffix_from(1);
    for (int ri : rules_of_[p.head()]) {
        const Rule& r = rules_[ri];
        out.emplace_back(r.action, r.rhs.concat(rest));
    }
    return out;
}

Process System::parse_process(const std::string& text) const {
    Process p;
    if (text == "eps" || text.empty()) return p;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, '.')) {
        int c = constant_index(part);
        if (c < 0) throw Error("unknown constant '" + part + "' in process");
        p.syms.push_back(c);
    }
    return p;
}

std::string System::format_process(const Process& p) const {
    if (p.empty()) return "eps";
    std::string out;
    for (std::size_t i = 0; i < p.syms.size(); ++i) {
        if (i) out += ".";
        out += const_names_[p.syms[i]];
    }
    return out;
}

Mask System::parse_ref_set(const std::string& text) const {
    std::string t = text;
    if (t.size() >= 2 && t.front() == '{' && t.back() == '}')
        t = t.substr(1, t.size() - 2);
    Mask m = 0;
    if (t.empty()) return m;
    std::stringstream ss(t);
    std::string part;
    while (std::getline(ss, part, ',')) {
        int c = constant_index(part);
        if (c < 0)
            throw Error("unknown constant '" + part + "' in reference set");
        m |= mask_bit(c);
    }
    return m;
}

std::string System::format_ref_set(Mask m) const {
    std::string out = "{";
    bool first = true;
    for (int c = 0; c < num_constants(); ++c) {
        if (!mask_has(m, c)) continue;
        if (!first) out += ",";
        out += const_names_[c];
        first = false;
    }
    return out + "}";
}

NormTable validate_normed(const System& sys) {
    int n = sys.num_constants();
    constexpr nat128 kInf = static_cast<nat128>(-1);
    NormTable t;
    t.strong.assign(n, kInf);
    t.weak.assign(n, kInf);

    // Round-robin relaxation; zero-cost (silent) edges rule out a plain
    // Dijkstra for the weak norm, and the strong norm is handled the
    // same way for uniformity.
    auto relax = [&](std::vector<nat128>& norm, bool count_silent) {
        bool changed = true;
        while (changed) {
            changed = false;
            for (const Rule& r : sys.rules()) {
                nat128 cost = (count_silent || r.action != kTau) ? 1 : 0;
                nat128 sum = cost;
                bool ok = true;
                for (int c : r.rhs.syms) {
                    if (norm[c] == kInf) {
                        ok = false;
                        break;
                    }
                    sum = nat_add(sum, norm[c]);
                }
                if (ok && sum < norm[r.lhs]) {
                    norm[r.lhs] = sum;
                    changed = true;
                }
            }
        }
    };
    relax(t.strong, true);
    relax(t.weak, false);

    std::vector<std::string> bad;
    for (int c = 0; c < n; ++c)
        if (t.strong[c] == kInf) bad.push_back(sys.constant_name(c));
    if (!bad.empty()) throw UnnormedError(std::move(bad));
    return t;
}

}  // namespace bpa
