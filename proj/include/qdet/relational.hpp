#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qdet/error.hpp"

namespace qdet {

enum class Sort { Uninterpreted, Int, Bool, String };

std::string_view sort_name(Sort sort);

/// A sort-tagged constant. Uninterpreted values are abstract identities
/// written #0, #1, ...; they compare equal iff their ids match.
struct Value {
    Sort sort = Sort::Uninterpreted;
    std::variant<std::int64_t, bool, std::string> payload = std::int64_t{0};

    static Value uninterpreted(std::int64_t id) { return {Sort::Uninterpreted, id}; }
    static Value integer(std::int64_t v) { return {Sort::Int, v}; }
    static Value boolean(bool b) { return {Sort::Bool, b}; }
    static Value text(std::string s) { return {Sort::String, std::move(s)}; }

    std::int64_t as_int() const { return std::get<std::int64_t>(payload); }
    bool as_bool() const { return std::get<bool>(payload); }
    const std::string& as_text() const { return std::get<std::string>(payload); }

    auto operator<=>(const Value&) const = default;
};

std::string to_string(const Value& v);

/// Relation-qualified column name. The query has no self joins, so the
/// relation name alone disambiguates; no alias machinery exists.
struct ColumnRef {
    std::string relation;
    std::string column;

    auto operator<=>(const ColumnRef&) const = default;
};

std::string to_string(const ColumnRef& c);

struct ColumnDecl {
    std::string name;
    Sort sort = Sort::Uninterpreted;

    auto operator<=>(const ColumnDecl&) const = default;
};

struct RelationDecl {
    std::string name;
    std::vector<ColumnDecl> columns;

    const ColumnDecl* find_column(std::string_view column) const;

    auto operator<=>(const RelationDecl&) const = default;
};

struct Schema {
    std::vector<RelationDecl> relations;

    std::optional<std::size_t> relation_index(std::string_view name) const;
    const RelationDecl& relation(std::size_t index) const;
    std::size_t size() const { return relations.size(); }

    /// Sort of a qualified column, or nullopt if it does not resolve.
    std::optional<Sort> column_sort(const ColumnRef& ref) const;

    auto operator<=>(const Schema&) const = default;
};

/// Operand of a comparison atom: a qualified column or a constant.
struct Term {
    enum class Kind { Column, Constant };

    Kind kind = Kind::Column;
    ColumnRef column;
    Value constant;

    static Term col(ColumnRef c) {
        Term t;
        t.kind = Kind::Column;
        t.column = std::move(c);
        return t;
    }
    static Term val(Value v) {
        Term t;
        t.kind = Kind::Constant;
        t.constant = std::move(v);
        return t;
    }

    auto operator<=>(const Term&) const = default;
};

std::string to_string(const Term& t);

enum class CmpOp { Eq, Lt, Le };

/// Quantifier-free boolean AST over comparison atoms. And/Or are n-ary,
/// Not has exactly one child.
struct Predicate {
    enum class Kind { True, False, And, Or, Not, Atom };

    Kind kind = Kind::True;
    CmpOp op = CmpOp::Eq;
    Term lhs, rhs;
    std::vector<Predicate> children;

    static Predicate make_true() { return {}; }
    static Predicate make_false() {
        Predicate p;
        p.kind = Kind::False;
        return p;
    }
    static Predicate make_atom(CmpOp op, Term lhs, Term rhs);
    static Predicate make_and(std::vector<Predicate> children);
    static Predicate make_or(std::vector<Predicate> children);
    static Predicate make_not(Predicate child);

    bool is_atom() const { return kind == Kind::Atom; }

    bool operator==(const Predicate&) const = default;
};

/// Folding constructors: TRUE/FALSE absorption plus `x = x` on identical
/// terms. Used when assembling formulas so degenerate inputs stay small.
Predicate fold_and(std::vector<Predicate> children);
Predicate fold_or(std::vector<Predicate> children);
Predicate fold_not(Predicate child);
Predicate fold_eq(Term lhs, Term rhs);

/// π_U σ_θ R over a single source relation.
struct ViewDef {
    std::string name;
    std::size_t source = 0; // index into Schema::relations
    std::vector<ColumnRef> projection;
    Predicate predicate;

    bool operator==(const ViewDef&) const = default;
};

/// π_U σ_θ (R_1 × ... × R_m); every schema relation appears exactly once.
struct QueryDef {
    std::vector<ColumnRef> projection;
    Predicate predicate;

    bool operator==(const QueryDef&) const = default;
};

/// A tuple (and, interchangeably, an evaluation binding): qualified columns
/// mapped to values. Joined tuples simply carry columns of several relations.
struct Tuple {
    std::map<ColumnRef, Value> cells;

    const Value* find(const ColumnRef& ref) const;

    auto operator<=>(const Tuple&) const = default;
};

std::string to_string(const Tuple& t);

/// One tuple per relation, in schema order.
struct TupleSeq {
    std::vector<Tuple> tuples;

    std::size_t size() const { return tuples.size(); }

    /// Sub-sequence covering 0-based positions [from, to).
    TupleSeq sub(std::size_t from, std::size_t to) const;

    bool operator==(const TupleSeq&) const = default;
};

TupleSeq concat(const TupleSeq& a, const TupleSeq& b);

/// Returns `ts` with 0-based position `index` replaced by `replacement`.
/// The replacement must carry the same columns with the same value sorts as
/// the tuple it displaces.
TupleSeq seq_except(const TupleSeq& ts, std::size_t index, Tuple replacement);

/// Merges the per-relation tuples of a sequence into one joined tuple.
Tuple join_tuples(const TupleSeq& ts);

struct Instance {
    std::map<std::string, std::set<Tuple>> relations;

    const std::set<Tuple>& tuples_of(const std::string& relation) const;
    std::size_t total_tuples() const;

    bool operator==(const Instance&) const = default;
};

/// Throws SortMismatch/UnknownColumn if some tuple does not conform to its
/// relation's declaration.
void validate_instance(const Instance& inst, const Schema& schema);

/// Sub-tuple t[U]: the cells of `t` restricted to `columns`.
Tuple sub_tuple(const Tuple& t, const std::vector<ColumnRef>& columns);

/// Standard boolean evaluation. Eq compares values within one sort; Lt/Le
/// are defined on Int only.
bool eval_predicate(const Predicate& p, const Tuple& binding);

} // namespace qdet
