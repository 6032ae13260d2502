#include "qdet/relational.hpp"

#include <algorithm>
#include <sstream>

namespace qdet {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownColumn: return "UNKNOWN_COLUMN";
        case ErrorCode::UnboundColumn: return "UNBOUND_COLUMN";
        case ErrorCode::IndexOutOfRange: return "INDEX_OUT_OF_RANGE";
        case ErrorCode::SortMismatch: return "SORT_MISMATCH";
        case ErrorCode::UnsupportedTheory: return "UNSUPPORTED_THEORY";
        case ErrorCode::SolverTimeout: return "SOLVER_TIMEOUT";
        case ErrorCode::ExternalSolverFailure: return "EXTERNAL_SOLVER_FAILURE";
        case ErrorCode::VerificationFailed: return "VERIFICATION_FAILED";
        case ErrorCode::BudgetExceeded: return "BUDGET_EXCEEDED";
    }
    return "UNKNOWN_ERROR";
}

std::string_view sort_name(Sort sort) {
    switch (sort) {
        case Sort::Uninterpreted: return "uninterpreted";
        case Sort::Int: return "int";
        case Sort::Bool: return "bool";
        case Sort::String: return "string";
    }
    return "?";
}

std::string to_string(const Value& v) {
    switch (v.sort) {
        case Sort::Uninterpreted: return "#" + std::to_string(v.as_int());
        case Sort::Int: return std::to_string(v.as_int());
        case Sort::Bool: return v.as_bool() ? "true" : "false";
        case Sort::String: return "\"" + v.as_text() + "\"";
    }
    return "?";
}

std::string to_string(const ColumnRef& c) { return c.relation + "." + c.column; }

const ColumnDecl* RelationDecl::find_column(std::string_view column) const {
    for (const auto& c : columns)
        if (c.name == column) return &c;
    return nullptr;
}

std::optional<std::size_t> Schema::relation_index(std::string_view name) const {
    for (std::size_t i = 0; i < relations.size(); ++i)
        if (relations[i].name == name) return i;
    return std::nullopt;
}

const RelationDecl& Schema::relation(std::size_t index) const {
    if (index >= relations.size())
        throw Error(ErrorCode::IndexOutOfRange,
                    "relation index " + std::to_string(index) + " out of range");
    return relations[index];
}

std::optional<Sort> Schema::column_sort(const ColumnRef& ref) const {
    auto idx = relation_index(ref.relation);
    if (!idx) return std::nullopt;
    const ColumnDecl* col = relations[*idx].find_column(ref.column);
    if (!col) return std::nullopt;
    return col->sort;
}

std::string to_string(const Term& t) {
    return t.kind == Term::Kind::Column ? to_string(t.column) : to_string(t.constant);
}

Predicate Predicate::make_atom(CmpOp op, Term lhs, Term rhs) {
    Predicate p;
    p.kind = Kind::Atom;
    p.op = op;
    p.lhs = std::move(lhs);
    p.rhs = std::move(rhs);
    return p;
}

Predicate Predicate::make_and(std::vector<Predicate> children) {
    Predicate p;
    p.kind = Kind::And;
    p.children = std::move(children);
    return p;
}

Predicate Predicate::make_or(std::vector<Predicate> children) {
    Predicate p;
    p.kind = Kind::Or;
    p.children = std::move(children);
    return p;
}

Predicate Predicate::make_not(Predicate child) {
    Predicate p;
    p.kind = Kind::Not;
    p.children.push_back(std::move(child));
    return p;
}

Predicate fold_and(std::vector<Predicate> children) {
    std::vector<Predicate> kept;
    for (auto& c : children) {
        if (c.kind == Predicate::Kind::False) return Predicate::make_false();
        if (c.kind == Predicate::Kind::True) continue;
        kept.push_back(std::move(c));
    }
    if (kept.empty()) return Predicate::make_true();
    if (kept.size() == 1) return std::move(kept.front());
    return Predicate::make_and(std::move(kept));
}

Predicate fold_or(std::vector<Predicate> children) {
    std::vector<Predicate> kept;
    for (auto& c : children) {
        if (c.kind == Predicate::Kind::True) return Predicate::make_true();
        if (c.kind == Predicate::Kind::False) continue;
        kept.push_back(std::move(c));
    }
    if (kept.empty()) return Predicate::make_false();
    if (kept.size() == 1) return std::move(kept.front());
    return Predicate::make_or(std::move(kept));
}

Predicate fold_not(Predicate child) {
    if (child.kind == Predicate::Kind::True) return Predicate::make_false();
    if (child.kind == Predicate::Kind::False) return Predicate::make_true();
    if (child.kind == Predicate::Kind::Not) return std::move(child.children.front());
    return Predicate::make_not(std::move(child));
}

Predicate fold_eq(Term lhs, Term rhs) {
    if (lhs == rhs) return Predicate::make_true();
    if (lhs.kind == Term::Kind::Constant && rhs.kind == Term::Kind::Constant &&
        lhs.constant.sort == rhs.constant.sort)
        return lhs.constant == rhs.constant ? Predicate::make_true() : Predicate::make_false();
    return Predicate::make_atom(CmpOp::Eq, std::move(lhs), std::move(rhs));
}

const Value* Tuple::find(const ColumnRef& ref) const {
    auto it = cells.find(ref);
    return it == cells.end() ? nullptr : &it->second;
}

std::string to_string(const Tuple& t) {
    std::ostringstream os;
    os << "(";
    bool first = true;
    for (const auto& [col, val] : t.cells) {
        if (!first) os << ", ";
        first = false;
        os << to_string(col) << "=" << to_string(val);
    }
    os << ")";
    return os.str();
}

TupleSeq TupleSeq::sub(std::size_t from, std::size_t to) const {
    if (from > to || to > tuples.size())
        throw Error(ErrorCode::IndexOutOfRange, "bad sub-sequence bounds");
    TupleSeq out;
    out.tuples.assign(tuples.begin() + static_cast<std::ptrdiff_t>(from),
                      tuples.begin() + static_cast<std::ptrdiff_t>(to));
    return out;
}

TupleSeq concat(const TupleSeq& a, const TupleSeq& b) {
    TupleSeq out = a;
    out.tuples.insert(out.tuples.end(), b.tuples.begin(), b.tuples.end());
    return out;
}

TupleSeq seq_except(const TupleSeq& ts, std::size_t index, Tuple replacement) {
    if (index >= ts.tuples.size())
        throw Error(ErrorCode::IndexOutOfRange,
                    "position " + std::to_string(index) + " out of range for sequence of " +
                        std::to_string(ts.tuples.size()));
    const Tuple& displaced = ts.tuples[index];
    if (replacement.cells.size() != displaced.cells.size())
        throw Error(ErrorCode::SortMismatch, "replacement tuple has a different column set");
    for (const auto& [col, val] : displaced.cells) {
        const Value* rv = replacement.find(col);
        if (!rv)
            throw Error(ErrorCode::SortMismatch, "replacement tuple misses column " + to_string(col));
        if (rv->sort != val.sort)
            throw Error(ErrorCode::SortMismatch, "replacement value sort differs at " + to_string(col));
    }
    TupleSeq out = ts;
    out.tuples[index] = std::move(replacement);
    return out;
}

Tuple join_tuples(const TupleSeq& ts) {
    Tuple joined;
    for (const Tuple& t : ts.tuples) joined.cells.insert(t.cells.begin(), t.cells.end());
    return joined;
}

const std::set<Tuple>& Instance::tuples_of(const std::string& relation) const {
    static const std::set<Tuple> empty;
    auto it = relations.find(relation);
    return it == relations.end() ? empty : it->second;
}

std::size_t Instance::total_tuples() const {
    std::size_t n = 0;
    for (const auto& [_, tuples] : relations) n += tuples.size();
    return n;
}

void validate_instance(const Instance& inst, const Schema& schema) {
    for (const auto& [name, tuples] : inst.relations) {
        auto idx = schema.relation_index(name);
        if (!idx) throw Error(ErrorCode::UnknownColumn, "instance names unknown relation " + name);
        const RelationDecl& decl = schema.relations[*idx];
        for (const Tuple& t : tuples) {
            if (t.cells.size() != decl.columns.size())
                throw Error(ErrorCode::SortMismatch,
                            "tuple " + to_string(t) + " does not cover relation " + name);
            for (const ColumnDecl& col : decl.columns) {
                const Value* v = t.find({name, col.name});
                if (!v)
                    throw Error(ErrorCode::UnknownColumn,
                                "tuple misses column " + name + "." + col.name);
                if (v->sort != col.sort)
                    throw Error(ErrorCode::SortMismatch,
                                "value sort differs at " + name + "." + col.name);
            }
        }
    }
}

Tuple sub_tuple(const Tuple& t, const std::vector<ColumnRef>& columns) {
    Tuple out;
    for (const ColumnRef& c : columns) {
        const Value* v = t.find(c);
        if (!v) throw Error(ErrorCode::UnknownColumn, "column " + to_string(c) + " absent from tuple");
        out.cells.emplace(c, *v);
    }
    return out;
}

namespace {

Value term_value(const Term& t, const Tuple& binding) {
    if (t.kind == Term::Kind::Constant) return t.constant;
    const Value* v = binding.find(t.column);
    if (!v) throw Error(ErrorCode::UnboundColumn, "no binding for " + to_string(t.column));
    return *v;
}

bool eval_atom(const Predicate& p, const Tuple& binding) {
    Value l = term_value(p.lhs, binding);
    Value r = term_value(p.rhs, binding);
    if (l.sort != r.sort)
        throw Error(ErrorCode::SortMismatch, "comparing " + std::string(sort_name(l.sort)) +
                                                 " with " + std::string(sort_name(r.sort)));
    switch (p.op) {
        case CmpOp::Eq: return l == r;
        case CmpOp::Lt:
        case CmpOp::Le:
            if (l.sort != Sort::Int)
                throw Error(ErrorCode::SortMismatch, "order comparison on non-int operands");
            return p.op == CmpOp::Lt ? l.as_int() < r.as_int() : l.as_int() <= r.as_int();
    }
    return false;
}

} // namespace

bool eval_predicate(const Predicate& p, const Tuple& binding) {
    switch (p.kind) {
        case Predicate::Kind::True: return true;
        case Predicate::Kind::False: return false;
        case Predicate::Kind::Not: return !eval_predicate(p.children.front(), binding);
        case Predicate::Kind::And:
            for (const auto& c : p.children)
                if (!eval_predicate(c, binding)) return false;
            return true;
        case Predicate::Kind::Or:
            for (const auto& c : p.children)
                if (eval_predicate(c, binding)) return true;
            return false;
        case Predicate::Kind::Atom: return eval_atom(p, binding);
    }
    return false;
}

} // namespace qdet
