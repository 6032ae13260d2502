#include "doctest.h"

#include "qdet/evaluator.hpp"
#include "qdet/oracle.hpp"
#include "support/testutil.hpp"

using namespace qdet;
using qdet::testsupport::parse_normalized;

TEST_CASE("an identity view is determined up to any bounds") {
    NormalizedProblem np = parse_normalized(
        "relation R(A: uninterpreted, B: uninterpreted);"
        "view V = project R.A, R.B where true from R;"
        "query project R.A where R.A = R.B from R;");
    OracleResult r = oracle_check(np, {2, 2, 500000});
    CHECK(r.determined_up_to_bounds);
    // 16 candidate tuples... 4 tuples over a 2-value domain, subsets of size
    // <= 2: 1 + 4 + 6 = 11 candidate instances
    CHECK(r.instances_enumerated == 11);
}

TEST_CASE("a projection mismatch yields a self-verified counterexample pair") {
    NormalizedProblem np = parse_normalized(
        "relation R(A: uninterpreted, B: uninterpreted);"
        "view V = project R.A where true from R;"
        "query project R.B where true from R;");
    OracleResult r = oracle_check(np, {2, 2, 500000});
    REQUIRE_FALSE(r.determined_up_to_bounds);
    REQUIRE(r.counterexample.has_value());
    const auto& [a, b] = *r.counterexample;
    CHECK(views_equal(np.all_views(), np.schema, a, b));
    CHECK(eval_query(np.query, np.schema, a) != eval_query(np.query, np.schema, b));
}

TEST_CASE("a constant-false query is determined by no views at all") {
    NormalizedProblem np = parse_normalized(
        "relation R(A: uninterpreted);"
        "query project R.A where false from R;");
    CHECK(oracle_check(np, {2, 2, 500000}).determined_up_to_bounds);
}

TEST_CASE("the work budget rejects oversized enumerations") {
    NormalizedProblem np = parse_normalized(
        "relation R(A: uninterpreted, B: uninterpreted, C: uninterpreted);"
        "query project R.A where true from R;");
    CHECK_THROWS_WITH_AS(oracle_check(np, {4, 4, 500000}),
                         doctest::Contains("BUDGET_EXCEEDED"), Error);
}

TEST_CASE("all three modes report identical results") {
    const char* problems[] = {
        "relation R(A: uninterpreted, B: uninterpreted);"
        "view V = project R.A where true from R;"
        "query project R.B where true from R;",

        "relation R(A: uninterpreted, B: uninterpreted);"
        "view V = project R.A, R.B where true from R;"
        "query project R.B where true from R;",

        "relation R1(A: uninterpreted); relation R2(C: uninterpreted);"
        "view V = project R1.A where true from R1;"
        "query project R1.A, R2.C where true from R1, R2;",

        "relation R(A: uninterpreted, B: uninterpreted);"
        "view V = project R.A where R.A = R.B from R;"
        "query project R.A where R.A = R.B from R;",

        "relation R(A: uninterpreted, F: bool);"
        "view V = project R.A where R.F = true from R;"
        "query project R.A where true from R;",
    };
    for (const char* text : problems) {
        NormalizedProblem np = parse_normalized(text);
        OracleBounds bounds{2, 2, 500000};
        OracleResult parallel = oracle_check(np, bounds, OracleMode::Parallel);
        OracleResult serial = oracle_check(np, bounds, OracleMode::Serial);
        OracleResult reference = oracle_check(np, bounds, OracleMode::Reference);

        CHECK(parallel.determined_up_to_bounds == reference.determined_up_to_bounds);
        CHECK(serial.determined_up_to_bounds == reference.determined_up_to_bounds);
        CHECK(parallel.counterexample == reference.counterexample);
        CHECK(serial.counterexample == reference.counterexample);
        CHECK(parallel.instances_enumerated == reference.instances_enumerated);
    }
}

TEST_CASE("int columns enumerate the small integer range") {
    NormalizedProblem np = parse_normalized(
        "relation R(N: int, B: uninterpreted);"
        "view V = project R.N where R.N < 1 from R;"
        "query project R.N where true from R;");
    OracleResult r = oracle_check(np, {2, 2, 500000});
    // the view only exposes rows with N = 0; rows with N = 1 are invisible
    CHECK_FALSE(r.determined_up_to_bounds);
}

TEST_CASE("string predicates see their own literals in the domain") {
    NormalizedProblem np = parse_normalized(
        "relation R(S: string, B: uninterpreted);"
        "view V = project R.S, R.B where R.S = \"admin\" from R;"
        "query project R.B where R.S = \"admin\" from R;");
    // the view pins down exactly the rows the query needs
    CHECK(oracle_check(np, {2, 2, 500000}).determined_up_to_bounds);

    NormalizedProblem np2 = parse_normalized(
        "relation R(S: string, B: uninterpreted);"
        "view V = project R.B where R.S = \"admin\" from R;"
        "query project R.B where true from R;");
    CHECK_FALSE(oracle_check(np2, {2, 2, 500000}).determined_up_to_bounds);
}
