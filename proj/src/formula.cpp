#include "qdet/formula.hpp"

namespace qdet {

const TupleVar* Formula::find_var(std::string_view label) const {
    for (const auto& v : vars)
        if (v.label == label) return &v;
    return nullptr;
}

namespace {

TupleVar make_var(const NormalizedProblem& p, std::string label, std::size_t relation,
                  TupleVar::Role role, std::size_t view) {
    TupleVar v;
    v.label = std::move(label);
    v.relation = relation;
    v.role = role;
    v.view = view;
    v.columns = p.schema.relation(relation).columns;
    return v;
}

std::vector<std::string> base_labels(const NormalizedProblem& p) {
    std::vector<std::string> labels;
    labels.reserve(p.relation_count());
    for (std::size_t i = 0; i < p.relation_count(); ++i)
        labels.push_back("t" + std::to_string(i + 1));
    return labels;
}

Term rewrite_term(const Term& t, const Schema& schema,
                  const std::vector<std::string>& label_by_relation) {
    if (t.kind != Term::Kind::Column) return t;
    auto idx = schema.relation_index(t.column.relation);
    if (!idx)
        throw Error(ErrorCode::UnknownColumn,
                    "predicate references unknown relation " + t.column.relation);
    return Term::col({label_by_relation.at(*idx), t.column.column});
}

} // namespace

std::vector<TupleVar> base_tuple_vars(const NormalizedProblem& p) {
    std::vector<TupleVar> vars;
    auto labels = base_labels(p);
    for (std::size_t i = 0; i < p.relation_count(); ++i)
        vars.push_back(make_var(p, labels[i], i, TupleVar::Role::BaseTuple, 0));
    return vars;
}

TupleVar skolem_witness_var(const NormalizedProblem& p, std::size_t i, std::size_t j) {
    return make_var(p, "w" + std::to_string(i + 1) + "_" + std::to_string(j + 1), i,
                    TupleVar::Role::SkolemWitness, j);
}

Predicate instantiate(const Predicate& pred, const Schema& schema,
                      const std::vector<std::string>& label_by_relation) {
    switch (pred.kind) {
        case Predicate::Kind::True:
        case Predicate::Kind::False:
            return pred;
        case Predicate::Kind::Atom:
            return Predicate::make_atom(pred.op, rewrite_term(pred.lhs, schema, label_by_relation),
                                        rewrite_term(pred.rhs, schema, label_by_relation));
        default: {
            Predicate out;
            out.kind = pred.kind;
            out.children.reserve(pred.children.size());
            for (const auto& c : pred.children)
                out.children.push_back(instantiate(c, schema, label_by_relation));
            return out;
        }
    }
}

Formula build_phi(const NormalizedProblem& p, std::size_t i, std::size_t j, const TupleVar& t,
                  const TupleVar& t_prime) {
    if (t.relation != i || t_prime.relation != i)
        throw Error(ErrorCode::IndexOutOfRange, "phi variables must range over relation i");
    const ViewDef& view = p.views_by_relation.at(i).at(j);

    std::vector<std::string> to_prime(p.relation_count());
    to_prime[i] = t_prime.label;

    std::vector<Predicate> conj;
    conj.push_back(instantiate(view.predicate, p.schema, to_prime));
    for (const ColumnRef& col : view.projection)
        conj.push_back(fold_eq(Term::col(t_prime.column_ref(col.column)),
                               Term::col(t.column_ref(col.column))));

    Formula f;
    f.body = fold_and(std::move(conj));
    f.vars = {t, t_prime};
    return f;
}

Formula build_psi(const NormalizedProblem& p, std::size_t i, std::size_t j,
                  const std::vector<TupleVar>& base, const TupleVar& t_prime) {
    (void)j;
    if (base.size() != p.relation_count())
        throw Error(ErrorCode::IndexOutOfRange, "psi needs one base variable per relation");
    if (t_prime.relation != i)
        throw Error(ErrorCode::IndexOutOfRange, "psi witness must range over relation i");

    // s = base EXCEPT i -> t', at the variable level.
    std::vector<std::string> base_l, subst_l;
    for (const TupleVar& v : base) {
        base_l.push_back(v.label);
        subst_l.push_back(v.label);
    }
    subst_l[i] = t_prime.label;

    std::vector<Predicate> conj;
    conj.push_back(instantiate(p.query.predicate, p.schema, subst_l));
    for (const ColumnRef& col : p.query.projection) {
        auto rel = p.schema.relation_index(col.relation);
        if (!rel)
            throw Error(ErrorCode::UnknownColumn, "query projects unknown relation " + col.relation);
        // s and base share the variable for every relation other than i,
        // so those equalities fold to TRUE.
        conj.push_back(fold_eq(Term::col({subst_l[*rel], col.column}),
                               Term::col({base_l[*rel], col.column})));
    }

    Formula f;
    f.body = fold_and(std::move(conj));
    f.vars = base;
    f.vars.push_back(t_prime);
    return f;
}

Formula build_negated_star(const NormalizedProblem& p, std::size_t i) {
    if (i >= p.relation_count())
        throw Error(ErrorCode::IndexOutOfRange, "relation index out of range");

    std::vector<TupleVar> base = base_tuple_vars(p);
    std::vector<std::string> labels = base_labels(p);

    std::vector<Predicate> conj;
    conj.push_back(instantiate(p.query.predicate, p.schema, labels));

    std::vector<TupleVar> vars = base;
    const auto& views = p.views_by_relation.at(i);
    std::vector<std::string> to_base_i(p.relation_count());
    to_base_i[i] = base[i].label;
    for (std::size_t j = 0; j < views.size(); ++j) {
        TupleVar witness = skolem_witness_var(p, i, j);
        Predicate theta_ij_on_t = instantiate(views[j].predicate, p.schema, to_base_i);
        Predicate phi = build_phi(p, i, j, base[i], witness).body;
        Predicate psi = build_psi(p, i, j, base, witness).body;
        std::vector<Predicate> disjuncts;
        disjuncts.push_back(fold_not(std::move(theta_ij_on_t)));
        disjuncts.push_back(fold_and({std::move(phi), fold_not(std::move(psi))}));
        conj.push_back(fold_or(std::move(disjuncts)));
        vars.push_back(std::move(witness));
    }

    Formula f;
    f.body = fold_and(std::move(conj));
    f.vars = std::move(vars);
    return f;
}

} // namespace qdet
