#include "qdet/explain.hpp"

#include <sstream>

#include "qdet/formula.hpp"

namespace qdet {

namespace {

struct Style {
    const char* and_;
    const char* or_;
    const char* not_;
    const char* true_;
    const char* false_;
    const char* lt_;
    const char* le_;
    const char* forall;
    const char* exists;
    const char* implies;
};

constexpr Style kAscii = {"and", "or", "not", "true", "false", "<", "<=", "forall", "exists", "=>"};
constexpr Style kLatex = {"\\land", "\\lor", "\\lnot", "\\top",    "\\bot",
                          "<",      "\\le",  "\\forall", "\\exists", "\\Rightarrow"};

void render_pred(const Predicate& p, const Style& st, std::string& out) {
    auto child = [&](const Predicate& c) {
        bool wrap = c.kind == Predicate::Kind::And || c.kind == Predicate::Kind::Or ||
                    c.kind == Predicate::Kind::Not;
        if (wrap) out += "(";
        render_pred(c, st, out);
        if (wrap) out += ")";
    };
    switch (p.kind) {
        case Predicate::Kind::True: out += st.true_; break;
        case Predicate::Kind::False: out += st.false_; break;
        case Predicate::Kind::Not:
            out += st.not_;
            out += " ";
            child(p.children.front());
            break;
        case Predicate::Kind::And:
        case Predicate::Kind::Or: {
            std::string sep = std::string(" ") + (p.kind == Predicate::Kind::And ? st.and_ : st.or_) + " ";
            for (std::size_t i = 0; i < p.children.size(); ++i) {
                if (i) out += sep;
                child(p.children[i]);
            }
            break;
        }
        case Predicate::Kind::Atom:
            out += to_string(p.lhs);
            out += p.op == CmpOp::Eq ? " = " : p.op == CmpOp::Lt ? std::string(" ") + st.lt_ + " "
                                                                 : std::string(" ") + st.le_ + " ";
            out += to_string(p.rhs);
            break;
    }
}

std::string pred(const Predicate& p, const Style& st) {
    std::string out;
    render_pred(p, st, out);
    return out;
}

std::string quantified_vars(const std::vector<TupleVar>& vars, const Schema& schema) {
    std::string out;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (i) out += ", ";
        out += vars[i].label + " : " + schema.relation(vars[i].relation).name;
    }
    return out;
}

} // namespace

std::string render_conditions(const NormalizedProblem& p, bool latex) {
    const Style& st = latex ? kLatex : kAscii;
    std::ostringstream os;

    std::vector<TupleVar> base = base_tuple_vars(p);
    std::vector<std::string> base_labels;
    for (const auto& v : base) base_labels.push_back(v.label);
    Predicate theta = instantiate(p.query.predicate, p.schema, base_labels);

    for (std::size_t i = 0; i < p.relation_count(); ++i) {
        const auto& views = p.views_by_relation[i];
        const std::string rel = p.schema.relation(i).name;
        os << "=== relation " << rel << " (i = " << i + 1 << "), " << views.size()
           << " view(s) ===\n\n";

        os << "condition:\n";
        if (views.empty()) {
            // an empty disjunction: the condition collapses to the query
            // predicate never holding
            os << "  " << st.forall << " " << quantified_vars(base, p.schema) << " : " << st.not_
               << " (" << pred(theta, st) << ")\n";
        } else {
            os << "  " << st.forall << " " << quantified_vars(base, p.schema) << " :\n";
            os << "    " << pred(theta, st) << "\n";
            for (std::size_t j = 0; j < views.size(); ++j) {
                TupleVar w = skolem_witness_var(p, i, j);
                w.label = "u"; // display name for the inner bound variable
                std::vector<std::string> on_base_i(p.relation_count());
                on_base_i[i] = base[i].label;
                Predicate theta_ij = instantiate(views[j].predicate, p.schema, on_base_i);
                Predicate phi = build_phi(p, i, j, base[i], w).body;
                Predicate psi = build_psi(p, i, j, base, w).body;
                std::string lead = j == 0 ? std::string(st.implies) : std::string("  ") + st.or_;
                os << "    " << lead << " [" << views[j].name << "] " << pred(theta_ij, st) << " "
                   << st.and_ << " (" << st.forall << " u : " << rel << " : " << pred(phi, st)
                   << " " << st.implies << " " << pred(psi, st) << ")\n";
            }
        }

        Formula neg = build_negated_star(p, i);
        os << "\nnegation (skolemized; satisfiable iff the views fail to determine the query at "
           << rel << "):\n";
        os << "  " << st.exists << " " << quantified_vars(neg.vars, p.schema) << " :\n";
        os << "    " << pred(neg.body, st) << "\n\n";
    }
    return os.str();
}

} // namespace qdet
