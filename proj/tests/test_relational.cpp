#include "doctest.h"

#include "qdet/normalizer.hpp"
#include "qdet/relational.hpp"

using namespace qdet;

namespace {

Tuple make_tuple(std::initializer_list<std::pair<const char*, std::int64_t>> cells) {
    Tuple t;
    for (const auto& [col, val] : cells)
        t.cells.emplace(ColumnRef{"R", col}, Value::uninterpreted(val));
    return t;
}

ColumnRef rcol(const char* c) { return {"R", c}; }

} // namespace

TEST_CASE("sub_tuple projects onto the requested columns") {
    Tuple t = make_tuple({{"A", 1}, {"B", 2}});

    Tuple a = sub_tuple(t, {rcol("A")});
    CHECK(a.cells.size() == 1);
    CHECK(*a.find(rcol("A")) == Value::uninterpreted(1));

    CHECK(sub_tuple(t, {rcol("A"), rcol("B")}) == t);
    CHECK(sub_tuple(t, {}).cells.empty());

    CHECK_THROWS_WITH_AS(sub_tuple(t, {rcol("C")}), doctest::Contains("UNKNOWN_COLUMN"), Error);
}

TEST_CASE("sub_tuple is idempotent") {
    Tuple t = make_tuple({{"A", 1}, {"B", 2}, {"C", 1}});
    for (auto cols : {std::vector<ColumnRef>{rcol("A")}, {rcol("A"), rcol("C")},
                      {rcol("A"), rcol("B"), rcol("C")}}) {
        Tuple once = sub_tuple(t, cols);
        CHECK(sub_tuple(once, cols) == once);
    }
}

TEST_CASE("seq_except replaces exactly one position") {
    Tuple t1 = make_tuple({{"A", 1}});
    Tuple t2 = make_tuple({{"A", 2}});
    Tuple s = make_tuple({{"A", 9}});
    TupleSeq ts{{t1, t2}};

    CHECK(seq_except(ts, 0, t1) == ts);

    TupleSeq replaced = seq_except(ts, 1, s);
    CHECK(replaced.tuples[0] == t1);
    CHECK(replaced.tuples[1] == s);
    CHECK(ts.tuples[1] == t2); // input unmodified

    TupleSeq one{{t1}};
    CHECK_THROWS_WITH_AS(seq_except(one, 1, s), doctest::Contains("INDEX_OUT_OF_RANGE"), Error);

    Tuple wrong_cols;
    wrong_cols.cells.emplace(ColumnRef{"R", "Z"}, Value::uninterpreted(0));
    CHECK_THROWS_WITH_AS(seq_except(ts, 0, wrong_cols), doctest::Contains("SORT_MISMATCH"), Error);

    Tuple wrong_sort;
    wrong_sort.cells.emplace(rcol("A"), Value::integer(1));
    CHECK_THROWS_WITH_AS(seq_except(ts, 0, wrong_sort), doctest::Contains("SORT_MISMATCH"), Error);
}

TEST_CASE("sub-sequences and concatenation") {
    Tuple t1 = make_tuple({{"A", 1}});
    Tuple t2 = make_tuple({{"A", 2}});
    Tuple t3 = make_tuple({{"A", 3}});
    TupleSeq ts{{t1, t2, t3}};
    CHECK(ts.sub(1, 3).tuples == std::vector<Tuple>{t2, t3});
    CHECK(concat(ts.sub(0, 1), ts.sub(1, 3)) == ts);
    CHECK_THROWS_AS(ts.sub(2, 1), Error);
}

TEST_CASE("eval_predicate on ground bindings") {
    auto eq = [](const char* a, const char* b) {
        return Predicate::make_atom(CmpOp::Eq, Term::col(rcol(a)), Term::col(rcol(b)));
    };

    Tuple b1 = make_tuple({{"A", 1}, {"B", 1}});
    CHECK(eval_predicate(eq("A", "B"), b1));

    Tuple b2 = make_tuple({{"A", 1}, {"B", 1}, {"C", 1}});
    Predicate p = Predicate::make_and({eq("A", "B"), Predicate::make_not(eq("A", "C"))});
    CHECK_FALSE(eval_predicate(p, b2));

    Tuple b3;
    b3.cells.emplace(rcol("A"), Value::integer(7));
    Predicate le =
        Predicate::make_atom(CmpOp::Le, Term::col(rcol("A")), Term::val(Value::integer(5)));
    CHECK_FALSE(eval_predicate(le, b3));

    CHECK_THROWS_WITH_AS(eval_predicate(eq("A", "Z"), b1), doctest::Contains("UNBOUND_COLUMN"),
                         Error);

    Tuple mixed;
    mixed.cells.emplace(rcol("A"), Value::integer(1));
    mixed.cells.emplace(rcol("B"), Value::uninterpreted(1));
    CHECK_THROWS_WITH_AS(eval_predicate(eq("A", "B"), mixed), doctest::Contains("SORT_MISMATCH"),
                         Error);

    Predicate lt_uninterpreted =
        Predicate::make_atom(CmpOp::Lt, Term::col(rcol("A")), Term::col(rcol("B")));
    Tuple uu = make_tuple({{"A", 0}, {"B", 1}});
    CHECK_THROWS_WITH_AS(eval_predicate(lt_uninterpreted, uu), doctest::Contains("SORT_MISMATCH"),
                         Error);
}

TEST_CASE("evaluation agrees with the negation normal form on every small binding") {
    auto eq = [](const char* a, const char* b) {
        return Predicate::make_atom(CmpOp::Eq, Term::col(rcol(a)), Term::col(rcol(b)));
    };
    std::vector<Predicate> samples = {
        Predicate::make_not(Predicate::make_and({eq("A", "B"), Predicate::make_true()})),
        Predicate::make_not(Predicate::make_or(
            {eq("A", "B"), Predicate::make_not(Predicate::make_and({eq("B", "C"), eq("A", "C")}))})),
        Predicate::make_or({Predicate::make_not(Predicate::make_not(eq("A", "C"))),
                            Predicate::make_and({eq("A", "B"), Predicate::make_false()})}),
    };
    for (const Predicate& p : samples) {
        Predicate n = nnf(p);
        for (std::int64_t a = 0; a < 3; ++a)
            for (std::int64_t b = 0; b < 3; ++b)
                for (std::int64_t c = 0; c < 3; ++c) {
                    Tuple binding = make_tuple({{"A", a}, {"B", b}, {"C", c}});
                    CHECK(eval_predicate(p, binding) == eval_predicate(n, binding));
                }
    }
}

TEST_CASE("folding constructors absorb constants") {
    Predicate t = Predicate::make_true();
    Predicate f = Predicate::make_false();
    Predicate atom = Predicate::make_atom(CmpOp::Eq, Term::col(rcol("A")), Term::col(rcol("B")));

    CHECK(fold_and({t, atom}) == atom);
    CHECK(fold_and({f, atom}) == f);
    CHECK(fold_and({}) == t);
    CHECK(fold_or({f, atom}) == atom);
    CHECK(fold_or({t, atom}) == t);
    CHECK(fold_or({}) == f);
    CHECK(fold_not(t) == f);
    CHECK(fold_not(Predicate::make_not(atom)) == atom);
    CHECK(fold_eq(Term::col(rcol("A")), Term::col(rcol("A"))) == t);
    CHECK(fold_eq(Term::val(Value::integer(1)), Term::val(Value::integer(2))) == f);
}
