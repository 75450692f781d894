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
#include <stdexcept>
#include <string>
#include <vector>

namespace bpa {

/// Subset of constants, one bit per declaration index.  Systems are
/// capped at 64 constants, which is far beyond desk scale for this
/// kind of checker.
using Mask = std::uint64_t;

constexpr int kMaxConstants = 64;

inline bool mask_has(Mask m, int i) { return (m >> i) & 1u; }
inline Mask mask_bit(int i) { return Mask{1} << i; }
inline int mask_count(Mask m) { return __builtin_popcountll(m); }
inline bool mask_subset(Mask a, Mask b) { return (a & ~b) == 0; }

/// Norms are naturals that can be exponential in the system size, so
/// they are kept in 128 bits with overflow checks on arithmetic.
using nat128 = unsigned __int128;

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ParseError : public Error {
public:
    int line;
    int col;
    ParseError(int line_, int col_, const std::string& msg)
        : Error("parse error at " + std::to_string(line_) + ":" +
                std::to_string(col_) + ": " + msg),
          line(line_), col(col_) {}
};

class UnnormedError : public Error {
public:
    std::vector<std::string> constants;
    explicit UnnormedError(std::vector<std::string> cs)
        : Error(make_msg(cs)), constants(std::move(cs)) {}
private:
    static std::string make_msg(const std::vector<std::string>& cs) {
        std::string m = "system is not normed; offending constants:";
        for (const auto& c : cs) m += " " + c;
        return m;
    }
};

class MissingSliceError : public Error {
public:
    explicit MissingSliceError(const std::string& r)
        : Error("no base slice for reference set " + r) {}
};

class NormUnavailableError : public Error {
public:
    NormUnavailableError() : Error("semantic norm unavailable: untreated block") {}
};

class CapExceededError : public Error {
public:
    explicit CapExceededError(const std::string& what) : Error(what) {}
};

class InfeasibleParamsError : public Error {
public:
    explicit InfeasibleParamsError(const std::string& what)
        : Error("infeasible generator parameters: " + what) {}
};

inline nat128 nat_add(nat128 a, nat128 b) {
    nat128 r = a + b;
    if (r < a) throw CapExceededError("norm overflow in addition");
    return r;
}

inline nat128 nat_mul(nat128 a, nat128 b) {
    if (a != 0 && b > static_cast<nat128>(-1) / a)
        throw CapExceededError("norm overflow in multiplication");
    return a * b;
}

inline std::string nat_str(nat128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v > 0) {
        s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    return s;
}

}  // namespace bpa
