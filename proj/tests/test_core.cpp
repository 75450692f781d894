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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bpa/system.hpp"
#include "util.hpp"

using namespace bpa;

TEST_CASE("parse ex1") {
    System sys = fixture("ex1.bpa");
    CHECK(sys.num_constants() == 4);
    CHECK(sys.constant_name(0) == "A0");
    CHECK(sys.constant_name(1) == "A1");
    CHECK(sys.constant_name(2) == "B");
    CHECK(sys.constant_name(3) == "C");
    CHECK(sys.constant_index("C") == 3);
    CHECK(sys.constant_index("nope") == -1);
    CHECK(sys.rules().size() == 8);
    // Action 0 is always tau; the others appear in declaration order.
    CHECK(sys.num_actions() == 3);
    CHECK(sys.action_name(kTau) == "tau");
    CHECK(sys.action_name(1) == "a");
    CHECK(sys.action_name(2) == "b");
    CHECK(sys.warnings().empty());
}

TEST_CASE("ground fixpoint") {
    System sys = fixture("ex1.bpa");
    int b = sys.constant_index("B"), c = sys.constant_index("C");
    CHECK(sys.ground_mask() == (mask_bit(b) | mask_bit(c)));
    CHECK(sys.is_ground_const(b));
    CHECK_FALSE(sys.is_ground_const(sys.constant_index("A0")));
    CHECK(sys.is_ground(sys.parse_process("B.C.B")));
    CHECK_FALSE(sys.is_ground(sys.parse_process("A0.C")));
    CHECK(sys.is_ground(Process{}));

    // Groundness must close transitively through silent rules.
    System t = System::parse(
        "constants: G H\nrules:\nG -tau-> eps\nH -tau-> G.G\n");
    CHECK(t.ground_mask() == t.all_mask());
}

TEST_CASE("step follows head rules in declaration order") {
    System sys = fixture("ex1.bpa");
    Process p = sys.parse_process("A0.C");
    auto succ = sys.step(p);
    REQUIRE(succ.size() == 2);
    CHECK(succ[0].first == 1);  // a
    CHECK(succ[0].second == sys.parse_process("A1.C"));
    CHECK(succ[1].first == 2);  // b
    CHECK(succ[1].second == sys.parse_process("C"));
    CHECK(sys.step(Process{}).empty());
}

TEST_CASE("print parse round trip") {
    System sys = fixture("ex1.bpa");
    System again = System::parse(sys.print());
    CHECK(again.print() == sys.print());
    CHECK(again.rules() == sys.rules());
    CHECK(again.ground_mask() == sys.ground_mask());
}

TEST_CASE("process and ref-set literals") {
    System sys = fixture("ex1.bpa");
    CHECK(sys.parse_process("eps").empty());
    CHECK(sys.parse_process("").empty());
    CHECK(sys.format_process(Process{}) == "eps");
    Process p = sys.parse_process("A0.B.C");
    CHECK(sys.format_process(p) == "A0.B.C");
    CHECK_THROWS_AS(sys.parse_process("A0.X9"), Error);

    Mask bc = sys.parse_ref_set("{B,C}");
    CHECK(bc == (mask_bit(2) | mask_bit(3)));
    CHECK(sys.parse_ref_set("B,C") == bc);
    CHECK(sys.parse_ref_set("") == 0);
    CHECK(sys.parse_ref_set("{}") == 0);
    CHECK(sys.format_ref_set(bc) == "{B,C}");
    CHECK(sys.format_ref_set(0) == "{}");
    CHECK_THROWS_AS(sys.parse_ref_set("{D}"), Error);
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(System::parse("rules:\n"), ParseError);
    CHECK_THROWS_AS(System::parse("constants: X X\nrules:\n"), ParseError);
    CHECK_THROWS_AS(System::parse("constants: eps\nrules:\n"), ParseError);
    CHECK_THROWS_AS(System::parse("constants: X\nrules:\nY -a-> X\n"),
                    ParseError);
    CHECK_THROWS_AS(System::parse("constants: X\nrules:\nX -a-> Y\n"),
                    ParseError);
    CHECK_THROWS_AS(System::parse("constants: X\nrules:\nX a X\n"),
                    ParseError);
    CHECK_THROWS_AS(System::parse("constants: X\nrules:\nX -a->\n"),
                    ParseError);
    CHECK_THROWS_AS(System::parse(""), ParseError);
    CHECK_THROWS_AS(
        System::parse("constants: X\nconstants: Y\nrules:\n"), ParseError);

    try {
        System::parse("constants: X\nrules:\nX -a-> Y\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 3);
    }
}

TEST_CASE("duplicate rules are dropped with a warning") {
    System sys = System::parse(
        "constants: X\nrules:\nX -a-> eps\nX -a-> eps\n");
    CHECK(sys.rules().size() == 1);
    REQUIRE(sys.warnings().size() == 1);
    CHECK(sys.warnings()[0].find("duplicate rule") != std::string::npos);
}

TEST_CASE("norm table of ex1") {
    System sys = fixture("ex1.bpa");
    NormTable nt = validate_normed(sys);
    CHECK(nt.strong[0] == 1);  // A0 -b-> eps
    CHECK(nt.strong[1] == 2);  // A1 -b-> B -a-> eps
    CHECK(nt.strong[2] == 1);
    CHECK(nt.strong[3] == 1);
    CHECK(nt.weak[0] == 1);
    CHECK(nt.weak[1] == 1);  // A1 -b-> B -tau-> eps
    CHECK(nt.weak[2] == 0);
    CHECK(nt.weak[3] == 0);
    CHECK(nt.strong_of(sys.parse_process("A1.A1.C")) == 5);
    CHECK(nt.weak_of(sys.parse_process("A1.A1.C")) == 2);
    CHECK(nt.strong_of(Process{}) == 0);
}

TEST_CASE("unnormed system is rejected with the offending constants") {
    System sys = System::parse(
        "constants: X Y\nrules:\nX -a-> X\nY -a-> eps\n");
    try {
        validate_normed(sys);
        FAIL("expected UnnormedError");
    } catch (const UnnormedError& e) {
        REQUIRE(e.constants.size() == 1);
        CHECK(e.constants[0] == "X");
    }
}

TEST_CASE("weak norm ignores silent prefixes") {
    // X reaches eps only through a silent detour; its weak norm is the
    // number of visible steps on the cheapest path.
    System sys = System::parse(
        "constants: X Y\nrules:\nX -tau-> Y\nY -a-> eps\n");
    NormTable nt = validate_normed(sys);
    CHECK(nt.strong[0] == 2);
    CHECK(nt.weak[0] == 1);
    CHECK(nt.weak[1] == 1);
}

TEST_CASE("mask helpers") {
    CHECK(mask_count(0) == 0);
    CHECK(mask_count(mask_bit(0) | mask_bit(63)) == 2);
    CHECK(mask_subset(0, 0));
    CHECK(mask_subset(mask_bit(1), mask_bit(0) | mask_bit(1)));
    CHECK_FALSE(mask_subset(mask_bit(2), mask_bit(0) | mask_bit(1)));
}

TEST_CASE("nat128 overflow guards") {
    nat128 big = static_cast<nat128>(-1);
    CHECK_THROWS_AS(nat_add(big, 1), CapExceededError);
    CHECK_THROWS_AS(nat_mul(big, 2), CapExceededError);
    CHECK(nat_str(0) == "0");
    CHECK(nat_str(12345) == "12345");
}
