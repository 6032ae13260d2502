#include "doctest.h"

#include <cstdlib>
#include <random>

#include "qdet/formula.hpp"
#include "qdet/solver.hpp"
#include "support/brute_force.hpp"
#include "support/testutil.hpp"

using namespace qdet;
using qdet::testsupport::brute_force_sat;
using qdet::testsupport::parse_normalized;

namespace {

/// A formula over single-column variables named x, y, ... of one sort.
Formula vars_formula(std::vector<std::string> names, Sort sort, Predicate body) {
    Formula f;
    for (auto& name : names) {
        TupleVar v;
        v.label = std::move(name);
        v.relation = 0;
        v.columns = {{"v", sort}};
        f.vars.push_back(std::move(v));
    }
    f.body = std::move(body);
    return f;
}

Term var(const char* name) { return Term::col({name, "v"}); }

Predicate eq(Term a, Term b) { return Predicate::make_atom(CmpOp::Eq, a, b); }

const SolverConfig kBuiltin{};

} // namespace

TEST_CASE("a contradiction is unsat") {
    Formula f = vars_formula({"x", "y"}, Sort::Uninterpreted,
                             Predicate::make_and({eq(var("x"), var("y")),
                                                  Predicate::make_not(eq(var("x"), var("y")))}));
    CHECK(solve(f, kBuiltin).status == SatStatus::Unsat);
}

TEST_CASE("two equivalence classes get two canonical values") {
    Formula f = vars_formula({"x", "y", "z"}, Sort::Uninterpreted,
                             Predicate::make_and({eq(var("x"), var("y")),
                                                  Predicate::make_not(eq(var("y"), var("z")))}));
    SatResult r = solve(f, kBuiltin);
    REQUIRE(r.status == SatStatus::Sat);
    CHECK(*r.model.find({"x", "v"}) == Value::uninterpreted(0));
    CHECK(*r.model.find({"y", "v"}) == Value::uninterpreted(0));
    CHECK(*r.model.find({"z", "v"}) == Value::uninterpreted(1));
    CHECK(eval_predicate(f.body, r.model));
}

TEST_CASE("the identity-view condition is unsat end to end") {
    NormalizedProblem np = parse_normalized(
        "relation R(A: uninterpreted, B: uninterpreted);"
        "view V = project R.A, R.B where true from R;"
        "query project R.A where true from R;");
    Formula f = build_negated_star(np, 0);
    CHECK(solve(f, kBuiltin).status == SatStatus::Unsat);
    CHECK_FALSE(brute_force_sat(f).has_value());
}

TEST_CASE("unsupported content is rejected toward the external path") {
    Formula lt = vars_formula({"x", "y"}, Sort::Int,
                              Predicate::make_atom(CmpOp::Lt, var("x"), var("y")));
    CHECK_THROWS_WITH_AS(solve(lt, kBuiltin), doctest::Contains("UNSUPPORTED_THEORY"), Error);

    Formula int_eq = vars_formula({"x", "y"}, Sort::Int, eq(var("x"), var("y")));
    CHECK_THROWS_WITH_AS(solve(int_eq, kBuiltin), doctest::Contains("UNSUPPORTED_THEORY"), Error);

    // 31 distinct atoms exceed the builtin atom budget
    std::vector<std::string> names;
    std::vector<Predicate> chain;
    for (int i = 0; i < 32; ++i) names.push_back("x" + std::to_string(i));
    for (int i = 0; i < 31; ++i)
        chain.push_back(eq(var(names[i].c_str()), var(names[i + 1].c_str())));
    Formula wide = vars_formula(names, Sort::Uninterpreted, Predicate::make_and(chain));
    CHECK_THROWS_WITH_AS(solve(wide, kBuiltin), doctest::Contains("UNSUPPORTED_THEORY"), Error);
}

TEST_CASE("bool admits exactly two values") {
    auto diseq = [](const char* a, const char* b) {
        return Predicate::make_not(eq(var(a), var(b)));
    };
    Formula pair = vars_formula({"x", "y"}, Sort::Bool, diseq("x", "y"));
    CHECK(solve(pair, kBuiltin).status == SatStatus::Sat);

    Formula triangle =
        vars_formula({"x", "y", "z"}, Sort::Bool,
                     Predicate::make_and({diseq("x", "y"), diseq("y", "z"), diseq("z", "x")}));
    CHECK(solve(triangle, kBuiltin).status == SatStatus::Unsat);
    CHECK_FALSE(brute_force_sat(triangle).has_value());

    // an odd disequality cycle with no triangle is still unsatisfiable
    Formula five = vars_formula({"a", "b", "c", "d", "e"}, Sort::Bool,
                                Predicate::make_and({diseq("a", "b"), diseq("b", "c"),
                                                     diseq("c", "d"), diseq("d", "e"),
                                                     diseq("e", "a")}));
    CHECK(solve(five, kBuiltin).status == SatStatus::Unsat);
    CHECK_FALSE(brute_force_sat(five).has_value());

    Formula pinned = vars_formula(
        {"x"}, Sort::Bool,
        Predicate::make_and({eq(var("x"), Term::val(Value::boolean(true))),
                             eq(var("x"), Term::val(Value::boolean(false)))}));
    CHECK(solve(pinned, kBuiltin).status == SatStatus::Unsat);

    // same uninterpreted shape is satisfiable: the domain is infinite there
    Formula five_u = vars_formula({"a", "b", "c", "d", "e"}, Sort::Uninterpreted,
                                  Predicate::make_and({diseq("a", "b"), diseq("b", "c"),
                                                       diseq("c", "d"), diseq("d", "e"),
                                                       diseq("e", "a")}));
    CHECK(solve(five_u, kBuiltin).status == SatStatus::Sat);
}

TEST_CASE("distinct string literals are distinct values") {
    Formula clash = vars_formula(
        {"x"}, Sort::String,
        Predicate::make_and({eq(var("x"), Term::val(Value::text("a"))),
                             eq(var("x"), Term::val(Value::text("b")))}));
    CHECK(solve(clash, kBuiltin).status == SatStatus::Unsat);

    Formula fine = vars_formula(
        {"x"}, Sort::String,
        Predicate::make_and({eq(var("x"), Term::val(Value::text("a"))),
                             Predicate::make_not(eq(var("x"), Term::val(Value::text("b"))))}));
    SatResult r = solve(fine, kBuiltin);
    REQUIRE(r.status == SatStatus::Sat);
    CHECK(*r.model.find({"x", "v"}) == Value::text("a"));
}

TEST_CASE("builtin agrees with assignment enumeration on random formulas") {
    std::mt19937 rng(2024);
    auto random_pred = [&](auto&& self, int depth) -> Predicate {
        std::vector<Term> terms = {var("x"), var("y"), var("z"),
                                   Term::val(Value::uninterpreted(0)),
                                   Term::val(Value::uninterpreted(1))};
        switch (rng() % (depth > 2 ? 1 : 4)) {
            case 0: {
                Term a = terms[rng() % terms.size()];
                Term b = terms[rng() % terms.size()];
                return eq(a, b);
            }
            case 1: return Predicate::make_not(self(self, depth + 1));
            case 2: return Predicate::make_and({self(self, depth + 1), self(self, depth + 1)});
            default: return Predicate::make_or({self(self, depth + 1), self(self, depth + 1)});
        }
    };
    for (int round = 0; round < 300; ++round) {
        Formula f =
            vars_formula({"x", "y", "z"}, Sort::Uninterpreted, random_pred(random_pred, 0));
        SatResult got = solve(f, kBuiltin);
        auto expected = brute_force_sat(f);
        CHECK(got.status == (expected ? SatStatus::Sat : SatStatus::Unsat));
        if (got.status == SatStatus::Sat) CHECK(eval_predicate(f.body, got.model));
    }
}

TEST_CASE("smtlib emission is deterministic and structurally complete") {
    NormalizedProblem np = parse_normalized(
        "relation R(A: uninterpreted, B: uninterpreted);"
        "view V = project R.A where R.A = #0 from R;"
        "query project R.B where true from R;");
    Formula f = build_negated_star(np, 0);
    std::string script = emit_smtlib(f);
    CHECK(script == emit_smtlib(f));
    CHECK(script.find("(declare-sort U 0)") != std::string::npos);
    CHECK(script.find("(declare-const t1.A U)") != std::string::npos);
    CHECK(script.find("(declare-const w1_1.B U)") != std::string::npos);
    CHECK(script.find("(declare-const u!0 U)") != std::string::npos);
    CHECK(script.find("(assert ") != std::string::npos);
    CHECK(script.find("(check-sat)") != std::string::npos);
    CHECK(script.find("(get-model)") != std::string::npos);

    Formula lt = vars_formula({"x", "y"}, Sort::Int,
                              Predicate::make_atom(CmpOp::Lt, var("x"), var("y")));
    std::string lt_script = emit_smtlib(lt);
    CHECK(lt_script.find("(declare-const x.v Int)") != std::string::npos);
    CHECK(lt_script.find("(< x.v y.v)") != std::string::npos);

    Formula trivial = vars_formula({}, Sort::Uninterpreted, Predicate::make_true());
    CHECK(emit_smtlib(trivial).find("(assert true)") != std::string::npos);
}

TEST_CASE("model parsing maps solver values onto canonical constants") {
    Formula f = vars_formula({"x", "y", "z"}, Sort::Uninterpreted,
                             Predicate::make_and({eq(var("x"), var("y")),
                                                  Predicate::make_not(eq(var("y"), var("z")))}));

    CHECK(parse_model("unsat\n", f).status == SatStatus::Unsat);

    std::string sat_output = "sat\n"
                             "(\n"
                             "  (define-fun x.v () U U!val!3)\n"
                             "  (define-fun y.v () U U!val!3)\n"
                             "  (define-fun z.v () U U!val!7)\n"
                             ")\n";
    SatResult r = parse_model(sat_output, f);
    REQUIRE(r.status == SatStatus::Sat);
    CHECK(*r.model.find({"x", "v"}) == Value::uninterpreted(0));
    CHECK(*r.model.find({"z", "v"}) == Value::uninterpreted(1));

    // (model ...) wrapper and as-expressions are accepted too
    std::string wrapped = "sat\n"
                          "(model\n"
                          "  (define-fun x.v () U (as @u0 U))\n"
                          "  (define-fun y.v () U (as @u0 U))\n"
                          "  (define-fun z.v () U (as @u1 U))\n"
                          ")\n";
    CHECK(parse_model(wrapped, f).status == SatStatus::Sat);

    CHECK_THROWS_WITH_AS(parse_model("unknown\n", f),
                         doctest::Contains("EXTERNAL_SOLVER_FAILURE"), Error);
    CHECK_THROWS_WITH_AS(parse_model("flagrant error\n", f),
                         doctest::Contains("EXTERNAL_SOLVER_FAILURE"), Error);

    // a model that does not satisfy the formula is rejected
    std::string lying = "sat\n"
                        "((define-fun x.v () U A) (define-fun y.v () U B)"
                        " (define-fun z.v () U C))\n";
    CHECK_THROWS_WITH_AS(parse_model(lying, f), doctest::Contains("does not satisfy"), Error);

    // literal constants keep their identity through the solver's renaming
    Formula with_const = vars_formula(
        {"x"}, Sort::Uninterpreted,
        Predicate::make_not(eq(var("x"), Term::val(Value::uninterpreted(0)))));
    std::string const_output = "sat\n"
                               "((define-fun x.v () U U!val!5)"
                               " (define-fun u!0 () U U!val!2))\n";
    SatResult rc = parse_model(const_output, with_const);
    REQUIRE(rc.status == SatStatus::Sat);
    // x must not collide with the declared literal #0
    CHECK(*rc.model.find({"x", "v"}) != Value::uninterpreted(0));
}

TEST_CASE("a sat answer with no model block still yields a verified assignment") {
    Formula f = vars_formula({"x", "y"}, Sort::Uninterpreted,
                             Predicate::make_not(eq(var("x"), var("y"))));
    SatResult r = parse_model("sat\n", f);
    REQUIRE(r.status == SatStatus::Sat);
    CHECK(eval_predicate(f.body, r.model));
}

TEST_CASE("external subprocess plumbing") {
    const char* fake = std::getenv("QDET_FAKE_SOLVER");
    if (!fake) {
        MESSAGE("QDET_FAKE_SOLVER not set; skipping subprocess tests");
        return;
    }
    auto cfg = [&](const char* mode) {
        SolverConfig c;
        c.backend = SolverBackend::External;
        c.external_command = std::string(fake) + " " + mode;
        c.time_limit_seconds = 10;
        return c;
    };

    Formula needs_eq =
        vars_formula({"x", "y"}, Sort::Uninterpreted, eq(var("x"), var("y")));
    Formula needs_diseq = vars_formula({"x", "y"}, Sort::Uninterpreted,
                                       Predicate::make_not(eq(var("x"), var("y"))));

    CHECK(solve(needs_eq, cfg("same-model")).status == SatStatus::Sat);
    CHECK(solve(needs_diseq, cfg("fresh-model")).status == SatStatus::Sat);
    CHECK(solve(needs_eq, cfg("unsat")).status == SatStatus::Unsat);

    // a model that contradicts the formula must be rejected, not returned
    CHECK_THROWS_WITH_AS(solve(needs_eq, cfg("fresh-model")),
                         doctest::Contains("does not satisfy"), Error);

    CHECK_THROWS_WITH_AS(solve(needs_eq, cfg("unknown")), doctest::Contains("unknown"), Error);
    CHECK_THROWS_WITH_AS(solve(needs_eq, cfg("garbage")),
                         doctest::Contains("EXTERNAL_SOLVER_FAILURE"), Error);
    CHECK_THROWS_WITH_AS(solve(needs_eq, cfg("silent-fail")),
                         doctest::Contains("EXTERNAL_SOLVER_FAILURE"), Error);

    SolverConfig slow = cfg("sleep");
    slow.time_limit_seconds = 1;
    CHECK_THROWS_WITH_AS(solve(needs_eq, slow), doctest::Contains("SOLVER_TIMEOUT"), Error);

    SolverConfig missing;
    missing.backend = SolverBackend::External;
    CHECK_THROWS_AS(solve(needs_eq, missing), Error);
}
