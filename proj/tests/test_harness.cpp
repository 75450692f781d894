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

#include "bpa/harness.hpp"
#include "bpa/norms.hpp"
#include "util.hpp"

using namespace bpa;

TEST_CASE("generation is deterministic in the seed") {
    GenParams gp;
    gp.seed = 7;
    System a = generate_system(gp);
    System b = generate_system(gp);
    CHECK(a.print() == b.print());
    gp.seed = 8;
    System c = generate_system(gp);
    CHECK(a.print() != c.print());
}

TEST_CASE("generated systems are normed and well-formed") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        GenParams gp;
        gp.num_constants = 3 + static_cast<int>(seed % 4);
        gp.num_rules = gp.num_constants * 2;
        gp.seed = seed;
        System sys = generate_system(gp);
        CHECK_NOTHROW(validate_normed(sys));
        CHECK(sys.num_constants() == gp.num_constants);
        // Round-trip through the text format.
        System back = System::parse(sys.print());
        CHECK(back.print() == sys.print());
    }
}

TEST_CASE("infeasible generator parameters are rejected") {
    GenParams gp;
    gp.num_constants = 0;
    CHECK_THROWS_AS(generate_system(gp), InfeasibleParamsError);
    gp.num_constants = 4;
    gp.num_rules = 2;  // fewer rules than constants: someone is unnormed
    CHECK_THROWS_AS(generate_system(gp), InfeasibleParamsError);
}

TEST_CASE("small differential run is clean") {
    FuzzOptions opt;
    opt.trials = 5;
    opt.pairs_per_trial = 5;
    opt.seed = 42;
    opt.check_properties = true;
    FuzzReport rep = fuzz_compare(opt);
    CHECK(rep.trials_run == 5);
    CHECK(rep.queries > 0);
    CHECK(rep.clean());
    CHECK(rep.errors.empty());
    CHECK(rep.agreements + rep.unknowns == rep.queries);
}

TEST_CASE("engine invariants hold on the bundled examples") {
    for (const char* name : {"ex1.bpa", "ex2.bpa"}) {
        System sys = fixture(name);
        Engine eng(sys);
        CHECK(check_engine_properties(eng, 1).empty());
        CHECK(check_norm_laws(eng, 50, 1).empty());
    }
}
