#include "qdet/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#ifdef __unix__
#include <sys/wait.h>
#include <unistd.h>
#endif

namespace qdet {

namespace {

constexpr std::size_t kMaxBuiltinAtoms = 30;

// ---------------------------------------------------------------------------
// atom and term bookkeeping
// ---------------------------------------------------------------------------

using AtomKey = std::tuple<CmpOp, Term, Term>;

AtomKey canonical_atom(const Predicate& atom) {
    // Eq is symmetric; order the operands so x=y and y=x share one entry.
    if (atom.op == CmpOp::Eq && atom.rhs < atom.lhs) return {atom.op, atom.rhs, atom.lhs};
    return {atom.op, atom.lhs, atom.rhs};
}

Sort term_sort(const Term& t, const Formula& f) {
    if (t.kind == Term::Kind::Constant) return t.constant.sort;
    const TupleVar* var = f.find_var(t.column.relation);
    if (!var)
        throw Error(ErrorCode::UnboundColumn,
                    "formula atom references unknown variable " + t.column.relation);
    for (const auto& col : var->columns)
        if (col.name == t.column.column) return col.sort;
    throw Error(ErrorCode::UnknownColumn,
                "variable " + var->label + " has no column " + t.column.column);
}

struct AtomTable {
    std::vector<Predicate> atoms; // canonical operand order
    std::map<AtomKey, std::size_t> index;

    void collect(const Predicate& p) {
        if (p.kind == Predicate::Kind::Atom) {
            AtomKey key = canonical_atom(p);
            if (!index.count(key)) {
                index.emplace(key, atoms.size());
                auto [op, lhs, rhs] = key;
                atoms.push_back(Predicate::make_atom(op, lhs, rhs));
            }
            return;
        }
        for (const auto& c : p.children) collect(c);
    }

    std::size_t lookup(const Predicate& atom) const { return index.at(canonical_atom(atom)); }
};

/// Kleene three-valued evaluation against a partial atom assignment.
std::optional<bool> eval3(const Predicate& p, const AtomTable& table,
                          const std::vector<std::optional<bool>>& assign) {
    switch (p.kind) {
        case Predicate::Kind::True: return true;
        case Predicate::Kind::False: return false;
        case Predicate::Kind::Atom: return assign[table.lookup(p)];
        case Predicate::Kind::Not: {
            auto v = eval3(p.children.front(), table, assign);
            if (!v) return std::nullopt;
            return !*v;
        }
        case Predicate::Kind::And: {
            bool unknown = false;
            for (const auto& c : p.children) {
                auto v = eval3(c, table, assign);
                if (v && !*v) return false;
                if (!v) unknown = true;
            }
            if (unknown) return std::nullopt;
            return true;
        }
        case Predicate::Kind::Or: {
            bool unknown = false;
            for (const auto& c : p.children) {
                auto v = eval3(c, table, assign);
                if (v && *v) return true;
                if (!v) unknown = true;
            }
            if (unknown) return std::nullopt;
            return false;
        }
    }
    return std::nullopt;
}

struct UnionFind {
    std::vector<std::size_t> parent;

    explicit UnionFind(std::size_t n) : parent(n) {
        for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void merge(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

/// Allocates fresh values of a sort, never colliding with the literal
/// constants that occur in the formula.
class FreshValues {
public:
    explicit FreshValues(const AtomTable& table) {
        for (const auto& atom : table.atoms)
            for (const Term* t : {&atom.lhs, &atom.rhs})
                if (t->kind == Term::Kind::Constant) {
                    if (t->constant.sort == Sort::Uninterpreted)
                        used_ids_.insert(t->constant.as_int());
                    else if (t->constant.sort == Sort::String)
                        used_strings_.insert(t->constant.as_text());
                }
    }

    Value next(Sort sort) {
        switch (sort) {
            case Sort::Uninterpreted: {
                while (used_ids_.count(next_id_)) ++next_id_;
                return Value::uninterpreted(next_id_++);
            }
            case Sort::String: {
                std::string s;
                do {
                    s = "#" + std::to_string(next_string_++);
                } while (used_strings_.count(s));
                return Value::text(s);
            }
            case Sort::Int: return Value::integer(next_int_++);
            case Sort::Bool: return Value::boolean(false);
        }
        return Value::uninterpreted(next_id_++);
    }

private:
    std::set<std::int64_t> used_ids_;
    std::set<std::string> used_strings_;
    std::int64_t next_id_ = 0;
    std::int64_t next_string_ = 0;
    std::int64_t next_int_ = 0;
};

// ---------------------------------------------------------------------------
// builtin procedure
// ---------------------------------------------------------------------------

class BuiltinSolver {
public:
    explicit BuiltinSolver(const Formula& f) : f_(f) {
        table_.collect(f.body);
        validate();
        collect_terms();
    }

    SatResult run() {
        std::vector<std::optional<bool>> assign(table_.atoms.size());
        auto model = search(0, assign);
        if (!model) return {SatStatus::Unsat, {}};
        if (!eval_predicate(f_.body, *model))
            throw Error(ErrorCode::VerificationFailed, "builtin model failed re-evaluation");
        return {SatStatus::Sat, std::move(*model)};
    }

private:
    void validate() {
        if (table_.atoms.size() > kMaxBuiltinAtoms)
            throw Error(ErrorCode::UnsupportedTheory,
                        "formula has " + std::to_string(table_.atoms.size()) +
                            " atoms (builtin limit " + std::to_string(kMaxBuiltinAtoms) +
                            "); configure an external solver");
        for (const auto& atom : table_.atoms) {
            if (atom.op != CmpOp::Eq)
                throw Error(ErrorCode::UnsupportedTheory,
                            "builtin backend decides equality atoms only; configure an "
                            "external solver for order comparisons");
            Sort l = term_sort(atom.lhs, f_), r = term_sort(atom.rhs, f_);
            if (l != r) throw Error(ErrorCode::SortMismatch, "atom compares different sorts");
            if (l == Sort::Int)
                throw Error(ErrorCode::UnsupportedTheory,
                            "builtin backend does not decide int atoms; configure an "
                            "external solver");
        }
    }

    void collect_terms() {
        for (const auto& atom : table_.atoms)
            for (const Term* t : {&atom.lhs, &atom.rhs})
                if (!term_index_.count(*t)) {
                    term_index_.emplace(*t, terms_.size());
                    terms_.push_back(*t);
                    term_sorts_.push_back(term_sort(*t, f_));
                }
    }

    /// Assigns atom truth values depth-first. Prunes a branch as soon as the
    /// body is three-valued false, and stops early when the body is already
    /// three-valued true and the constraints assigned so far are consistent.
    std::optional<Tuple> search(std::size_t next_atom, std::vector<std::optional<bool>>& assign) {
        auto v = eval3(f_.body, table_, assign);
        if (v && !*v) return std::nullopt;
        if (v && *v) return consistent_model(assign);
        if (next_atom == table_.atoms.size()) return std::nullopt; // unreachable
        for (bool b : {true, false}) {
            assign[next_atom] = b;
            if (auto model = search(next_atom + 1, assign)) return model;
        }
        assign[next_atom] = std::nullopt;
        return std::nullopt;
    }

    /// Checks whether the asserted (dis)equalities admit a model; returns a
    /// total assignment of all variable columns when they do.
    std::optional<Tuple> consistent_model(const std::vector<std::optional<bool>>& assign) {
        UnionFind uf(terms_.size());
        for (std::size_t a = 0; a < table_.atoms.size(); ++a)
            if (assign[a] && *assign[a])
                uf.merge(term_index_.at(table_.atoms[a].lhs), term_index_.at(table_.atoms[a].rhs));

        // a class may contain at most one distinct constant
        std::map<std::size_t, const Value*> class_constant;
        for (std::size_t t = 0; t < terms_.size(); ++t) {
            if (terms_[t].kind != Term::Kind::Constant) continue;
            auto [it, inserted] = class_constant.emplace(uf.find(t), &terms_[t].constant);
            if (!inserted && *it->second != terms_[t].constant) return std::nullopt;
        }

        // asserted disequalities must separate classes
        for (std::size_t a = 0; a < table_.atoms.size(); ++a) {
            if (!assign[a] || *assign[a]) continue;
            if (uf.find(term_index_.at(table_.atoms[a].lhs)) ==
                uf.find(term_index_.at(table_.atoms[a].rhs)))
                return std::nullopt;
        }

        // bool has exactly two values: the disequality graph over bool
        // classes must be 2-colorable, honoring classes pinned by constants
        std::map<std::size_t, int> color;
        std::map<std::size_t, std::vector<std::size_t>> edges;
        std::vector<std::size_t> bool_classes;
        for (std::size_t t = 0; t < terms_.size(); ++t) {
            if (term_sorts_[t] != Sort::Bool) continue;
            std::size_t c = uf.find(t);
            if (!color.count(c)) {
                color[c] = -1;
                bool_classes.push_back(c);
            }
        }
        for (auto& [c, constant] : class_constant)
            if (constant->sort == Sort::Bool) color[c] = constant->as_bool() ? 1 : 0;
        for (std::size_t a = 0; a < table_.atoms.size(); ++a) {
            if (!assign[a] || *assign[a]) continue;
            std::size_t l = term_index_.at(table_.atoms[a].lhs);
            if (term_sorts_[l] != Sort::Bool) continue;
            std::size_t cl = uf.find(l), cr = uf.find(term_index_.at(table_.atoms[a].rhs));
            edges[cl].push_back(cr);
            edges[cr].push_back(cl);
        }
        auto propagate = [&](std::size_t seed) -> bool {
            std::vector<std::size_t> queue{seed};
            while (!queue.empty()) {
                std::size_t c = queue.back();
                queue.pop_back();
                for (std::size_t n : edges[c]) {
                    if (color[n] == -1) {
                        color[n] = 1 - color[c];
                        queue.push_back(n);
                    } else if (color[n] == color[c]) {
                        return false;
                    }
                }
            }
            return true;
        };
        for (std::size_t c : bool_classes)
            if (color[c] != -1 && !propagate(c)) return std::nullopt;
        for (std::size_t c : bool_classes) {
            if (color[c] != -1) continue;
            color[c] = 0;
            if (!propagate(c)) return std::nullopt;
        }

        // concrete value per class: its constant if pinned, fresh otherwise
        FreshValues fresh(table_);
        std::map<std::size_t, Value> class_value;
        for (std::size_t t = 0; t < terms_.size(); ++t) {
            std::size_t c = uf.find(t);
            if (class_value.count(c)) continue;
            if (auto it = class_constant.find(c); it != class_constant.end())
                class_value.emplace(c, *it->second);
            else if (term_sorts_[t] == Sort::Bool)
                class_value.emplace(c, Value::boolean(color[c] == 1));
            else
                class_value.emplace(c, fresh.next(term_sorts_[t]));
        }

        Tuple model;
        for (const TupleVar& var : f_.vars)
            for (const ColumnDecl& col : var.columns) {
                Term t = Term::col(var.column_ref(col.name));
                auto it = term_index_.find(t);
                if (it != term_index_.end())
                    model.cells.emplace(t.column, class_value.at(uf.find(it->second)));
                else
                    model.cells.emplace(t.column, fresh.next(col.sort));
            }
        return model;
    }

    const Formula& f_;
    AtomTable table_;
    std::vector<Term> terms_;
    std::vector<Sort> term_sorts_;
    std::map<Term, std::size_t> term_index_;
};

// ---------------------------------------------------------------------------
// SMT-LIB2 emission
// ---------------------------------------------------------------------------

struct LiteralTable {
    std::vector<std::int64_t> uninterpreted; // first-occurrence order
    std::vector<std::string> strings;

    static LiteralTable collect(const Formula& f) {
        LiteralTable t;
        t.walk(f.body);
        return t;
    }

    void walk(const Predicate& p) {
        if (p.kind == Predicate::Kind::Atom) {
            for (const Term* t : {&p.lhs, &p.rhs}) {
                if (t->kind != Term::Kind::Constant) continue;
                if (t->constant.sort == Sort::Uninterpreted) {
                    auto id = t->constant.as_int();
                    if (std::find(uninterpreted.begin(), uninterpreted.end(), id) ==
                        uninterpreted.end())
                        uninterpreted.push_back(id);
                } else if (t->constant.sort == Sort::String) {
                    const auto& s = t->constant.as_text();
                    if (std::find(strings.begin(), strings.end(), s) == strings.end())
                        strings.push_back(s);
                }
            }
            return;
        }
        for (const auto& c : p.children) walk(c);
    }

    std::string uninterpreted_symbol(std::int64_t id) const { return "u!" + std::to_string(id); }
    std::optional<std::string> string_symbol(const std::string& s) const {
        for (std::size_t i = 0; i < strings.size(); ++i)
            if (strings[i] == s) return "s!" + std::to_string(i);
        return std::nullopt;
    }
};

const char* smt_sort_name(Sort sort) {
    switch (sort) {
        case Sort::Uninterpreted: return "U";
        case Sort::String: return "Str";
        case Sort::Int: return "Int";
        case Sort::Bool: return "Bool";
    }
    return "U";
}

std::string smt_term(const Term& t, const LiteralTable& lits) {
    if (t.kind == Term::Kind::Column) return t.column.relation + "." + t.column.column;
    const Value& v = t.constant;
    switch (v.sort) {
        case Sort::Uninterpreted: return lits.uninterpreted_symbol(v.as_int());
        case Sort::String: return *lits.string_symbol(v.as_text());
        case Sort::Bool: return v.as_bool() ? "true" : "false";
        case Sort::Int:
            return v.as_int() < 0 ? "(- " + std::to_string(-v.as_int()) + ")"
                                  : std::to_string(v.as_int());
    }
    return "?";
}

void smt_body(const Predicate& p, const LiteralTable& lits, std::string& out) {
    switch (p.kind) {
        case Predicate::Kind::True: out += "true"; return;
        case Predicate::Kind::False: out += "false"; return;
        case Predicate::Kind::Atom:
            out += "(";
            out += p.op == CmpOp::Eq ? "=" : p.op == CmpOp::Lt ? "<" : "<=";
            out += " " + smt_term(p.lhs, lits) + " " + smt_term(p.rhs, lits) + ")";
            return;
        case Predicate::Kind::Not:
            out += "(not ";
            smt_body(p.children.front(), lits, out);
            out += ")";
            return;
        case Predicate::Kind::And:
        case Predicate::Kind::Or: {
            if (p.children.empty()) {
                out += p.kind == Predicate::Kind::And ? "true" : "false";
                return;
            }
            if (p.children.size() == 1) {
                smt_body(p.children.front(), lits, out);
                return;
            }
            out += p.kind == Predicate::Kind::And ? "(and" : "(or";
            for (const auto& c : p.children) {
                out += " ";
                smt_body(c, lits, out);
            }
            out += ")";
            return;
        }
    }
}

// ---------------------------------------------------------------------------
// model parsing
// ---------------------------------------------------------------------------

struct SExpr {
    bool is_atom = true;
    std::string text;
    std::vector<SExpr> items;

    std::string serialize() const {
        if (is_atom) return text;
        std::string out = "(";
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (i) out += " ";
            out += items[i].serialize();
        }
        return out + ")";
    }
};

class SExprReader {
public:
    explicit SExprReader(std::string_view text) : text_(text) {}

    std::vector<SExpr> read_all() {
        std::vector<SExpr> out;
        while (true) {
            skip_space();
            if (pos_ >= text_.size()) break;
            out.push_back(read());
        }
        return out;
    }

private:
    void skip_space() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    SExpr read() {
        skip_space();
        if (pos_ >= text_.size())
            throw Error(ErrorCode::ExternalSolverFailure, "truncated solver output");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            SExpr list;
            list.is_atom = false;
            while (true) {
                skip_space();
                if (pos_ >= text_.size())
                    throw Error(ErrorCode::ExternalSolverFailure, "unbalanced solver output");
                if (text_[pos_] == ')') {
                    ++pos_;
                    return list;
                }
                list.items.push_back(read());
            }
        }
        if (c == ')') throw Error(ErrorCode::ExternalSolverFailure, "stray ')' in solver output");
        SExpr atom;
        if (c == '"' || c == '|') {
            char closer = c;
            atom.text += c;
            ++pos_;
            while (pos_ < text_.size() && text_[pos_] != closer) atom.text += text_[pos_++];
            if (pos_ < text_.size()) atom.text += text_[pos_++];
            return atom;
        }
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
               text_[pos_] != '(' && text_[pos_] != ')' && text_[pos_] != ';')
            atom.text += text_[pos_++];
        return atom;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

void collect_define_funs(const SExpr& e, std::map<std::string, SExpr>& defs) {
    if (e.is_atom) return;
    if (e.items.size() == 5 && e.items[0].is_atom && e.items[0].text == "define-fun" &&
        e.items[1].is_atom && !e.items[2].is_atom && e.items[2].items.empty()) {
        defs[e.items[1].text] = e.items[4];
        return;
    }
    for (const auto& item : e.items) collect_define_funs(item, defs);
}

std::optional<std::int64_t> parse_int_value(const SExpr& e) {
    if (e.is_atom) {
        const std::string& s = e.text;
        if (s.empty()) return std::nullopt;
        std::size_t start = s[0] == '-' ? 1 : 0;
        if (start == s.size()) return std::nullopt;
        for (std::size_t i = start; i < s.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(s[i]))) return std::nullopt;
        return std::stoll(s);
    }
    if (e.items.size() == 2 && e.items[0].is_atom && e.items[0].text == "-") {
        auto inner = parse_int_value(e.items[1]);
        if (inner) return -*inner;
    }
    return std::nullopt;
}

} // namespace

std::string emit_smtlib(const Formula& f) {
    LiteralTable lits = LiteralTable::collect(f);

    bool uses_u = !lits.uninterpreted.empty();
    bool uses_str = !lits.strings.empty();
    bool uses_int = false;
    for (const TupleVar& var : f.vars)
        for (const ColumnDecl& col : var.columns) {
            if (col.sort == Sort::Uninterpreted) uses_u = true;
            if (col.sort == Sort::String) uses_str = true;
            if (col.sort == Sort::Int) uses_int = true;
        }

    (void)uses_int;
    std::ostringstream os;
    os << "(set-option :produce-models true)\n";
    os << "(set-logic ALL)\n";
    if (uses_u) os << "(declare-sort U 0)\n";
    if (uses_str) os << "(declare-sort Str 0)\n";
    for (const TupleVar& var : f.vars)
        for (const ColumnDecl& col : var.columns)
            os << "(declare-const " << var.label << "." << col.name << " "
               << smt_sort_name(col.sort) << ")\n";
    for (std::int64_t id : lits.uninterpreted)
        os << "(declare-const " << lits.uninterpreted_symbol(id) << " U)\n";
    for (std::size_t i = 0; i < lits.strings.size(); ++i)
        os << "(declare-const s!" << i << " Str) ; " << lits.strings[i] << "\n";
    if (lits.uninterpreted.size() > 1) {
        os << "(assert (distinct";
        for (std::int64_t id : lits.uninterpreted) os << " " << lits.uninterpreted_symbol(id);
        os << "))\n";
    }
    if (lits.strings.size() > 1) {
        os << "(assert (distinct";
        for (std::size_t i = 0; i < lits.strings.size(); ++i) os << " s!" << i;
        os << "))\n";
    }
    std::string body;
    smt_body(f.body, lits, body);
    os << "(assert " << body << ")\n";
    os << "(check-sat)\n";
    os << "(get-model)\n";
    return os.str();
}

SatResult parse_model(const std::string& solver_output, const Formula& f) {
    // locate the verdict token
    std::string verdict;
    std::string rest;
    {
        std::size_t pos = 0;
        while (pos < solver_output.size()) {
            std::size_t end = solver_output.find('\n', pos);
            if (end == std::string::npos) end = solver_output.size();
            std::string line = solver_output.substr(pos, end - pos);
            std::string trimmed;
            for (char c : line)
                if (!std::isspace(static_cast<unsigned char>(c))) trimmed += c;
            if (trimmed == "sat" || trimmed == "unsat" || trimmed == "unknown") {
                verdict = trimmed;
                rest = solver_output.substr(end);
                break;
            }
            pos = end + 1;
        }
    }
    if (verdict == "unsat") return {SatStatus::Unsat, {}};
    if (verdict == "unknown")
        throw Error(ErrorCode::ExternalSolverFailure, "solver returned 'unknown'");
    if (verdict != "sat")
        throw Error(ErrorCode::ExternalSolverFailure,
                    "no sat/unsat verdict in solver output: " + solver_output.substr(0, 200));

    std::map<std::string, SExpr> defs;
    for (const SExpr& e : SExprReader(rest).read_all()) collect_define_funs(e, defs);

    LiteralTable lits = LiteralTable::collect(f);

    // map solver-side value spellings of declared literal constants back to
    // the literals themselves
    std::map<std::string, Value> token_value;
    for (std::int64_t id : lits.uninterpreted) {
        auto it = defs.find(lits.uninterpreted_symbol(id));
        if (it != defs.end()) token_value.emplace(it->second.serialize(), Value::uninterpreted(id));
        token_value.emplace(lits.uninterpreted_symbol(id), Value::uninterpreted(id));
    }
    for (std::size_t i = 0; i < lits.strings.size(); ++i) {
        std::string sym = "s!" + std::to_string(i);
        auto it = defs.find(sym);
        if (it != defs.end()) token_value.emplace(it->second.serialize(), Value::text(lits.strings[i]));
        token_value.emplace(sym, Value::text(lits.strings[i]));
    }

    std::set<std::int64_t> used_ids(lits.uninterpreted.begin(), lits.uninterpreted.end());
    std::set<std::string> used_strings(lits.strings.begin(), lits.strings.end());
    std::int64_t next_id = 0;
    std::int64_t next_string = 0;
    auto fresh = [&](Sort sort) -> Value {
        if (sort == Sort::Uninterpreted) {
            while (used_ids.count(next_id)) ++next_id;
            used_ids.insert(next_id);
            return Value::uninterpreted(next_id);
        }
        std::string s;
        do {
            s = "#" + std::to_string(next_string++);
        } while (used_strings.count(s));
        used_strings.insert(s);
        return Value::text(s);
    };

    Tuple model;
    for (const TupleVar& var : f.vars)
        for (const ColumnDecl& col : var.columns) {
            std::string name = var.label + "." + col.name;
            auto it = defs.find(name);
            Value v;
            if (it == defs.end()) {
                // unconstrained in the model: any fresh value works
                v = col.sort == Sort::Bool  ? Value::boolean(false)
                    : col.sort == Sort::Int ? Value::integer(0)
                                            : fresh(col.sort);
            } else if (col.sort == Sort::Bool) {
                if (!it->second.is_atom || (it->second.text != "true" && it->second.text != "false"))
                    throw Error(ErrorCode::ExternalSolverFailure,
                                "unparseable bool value for " + name);
                v = Value::boolean(it->second.text == "true");
            } else if (col.sort == Sort::Int) {
                auto n = parse_int_value(it->second);
                if (!n)
                    throw Error(ErrorCode::ExternalSolverFailure,
                                "unparseable int value for " + name + ": " +
                                    it->second.serialize());
                v = Value::integer(*n);
            } else {
                std::string token = it->second.serialize();
                auto known = token_value.find(token);
                if (known != token_value.end()) {
                    v = known->second;
                    if (v.sort != col.sort)
                        throw Error(ErrorCode::ExternalSolverFailure,
                                    "model value for " + name + " has the wrong sort");
                } else {
                    v = fresh(col.sort);
                    token_value.emplace(token, v);
                }
            }
            model.cells.emplace(ColumnRef{var.label, col.name}, v);
        }

    if (!eval_predicate(f.body, model))
        throw Error(ErrorCode::ExternalSolverFailure, "solver model does not satisfy the formula");
    return {SatStatus::Sat, std::move(model)};
}

namespace {

/// Runs the external command with the script on stdin; stdout is captured
/// through a temp file. `timeout(1)` enforces the time limit.
SatResult solve_external(const Formula& f, const SolverConfig& cfg) {
    if (cfg.external_command.empty())
        throw Error(ErrorCode::ExternalSolverFailure, "external backend needs a solver command");

    static std::atomic<std::uint64_t> counter{0};
    auto dir = std::filesystem::temp_directory_path();
    std::string tag = "qdet-" + std::to_string(::getpid()) + "-" + std::to_string(counter++);
    auto in_path = dir / (tag + ".smt2");
    auto out_path = dir / (tag + ".out");
    auto err_path = dir / (tag + ".err");

    struct Cleanup {
        std::vector<std::filesystem::path> paths;
        ~Cleanup() {
            std::error_code ec;
            for (const auto& p : paths) std::filesystem::remove(p, ec);
        }
    } cleanup{{in_path, out_path, err_path}};

    {
        std::ofstream out(in_path);
        out << emit_smtlib(f);
    }

    std::ostringstream cmd;
    if (cfg.time_limit_seconds > 0) cmd << "timeout " << cfg.time_limit_seconds << " ";
    cmd << cfg.external_command << " < '" << in_path.string() << "' > '" << out_path.string()
        << "' 2> '" << err_path.string() << "'";
    int rc = std::system(cmd.str().c_str());

#ifdef __unix__
    int exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
#else
    int exit_code = rc;
#endif
    if (exit_code == 124)
        throw Error(ErrorCode::SolverTimeout, "external solver exceeded " +
                                                  std::to_string(cfg.time_limit_seconds) +
                                                  " seconds");

    std::ifstream out_file(out_path);
    std::stringstream buffer;
    buffer << out_file.rdbuf();
    std::string output = buffer.str();

    if (output.find("sat") == std::string::npos && output.find("unknown") == std::string::npos) {
        std::ifstream err_file(err_path);
        std::stringstream err_buffer;
        err_buffer << err_file.rdbuf();
        throw Error(ErrorCode::ExternalSolverFailure,
                    "solver exited with code " + std::to_string(exit_code) + ": " +
                        err_buffer.str().substr(0, 300));
    }
    return parse_model(output, f);
}

} // namespace

SatResult solve(const Formula& f, const SolverConfig& cfg) {
    if (cfg.backend == SolverBackend::External) return solve_external(f, cfg);
    return BuiltinSolver(f).run();
}

} // namespace qdet
