#include "qdet/counterexample.hpp"

#include "qdet/evaluator.hpp"
#include "qdet/formula.hpp"

namespace qdet {

namespace {

/// Reads the ground tuple of one tuple variable out of the model,
/// re-keying the cells from variable columns to relation columns.
Tuple extract_tuple(const TupleVar& var, const Schema& schema, const Tuple& model) {
    const RelationDecl& rel = schema.relation(var.relation);
    Tuple out;
    for (const ColumnDecl& col : rel.columns) {
        const Value* v = model.find({var.label, col.name});
        if (!v)
            throw Error(ErrorCode::VerificationFailed,
                        "model is not total: missing " + var.label + "." + col.name);
        out.cells.emplace(ColumnRef{rel.name, col.name}, *v);
    }
    return out;
}

} // namespace

Counterexample construct_counterexample(const NormalizedProblem& p, std::size_t k,
                                        const SatResult& sat) {
    if (sat.status != SatStatus::Sat)
        throw Error(ErrorCode::VerificationFailed, "cannot build a counterexample from UNSAT");
    const std::size_t m = p.relation_count();
    if (k >= m) throw Error(ErrorCode::IndexOutOfRange, "relation index out of range");

    std::vector<TupleVar> base = base_tuple_vars(p);
    TupleSeq ground;
    for (const TupleVar& var : base) ground.tuples.push_back(extract_tuple(var, p.schema, sat.model));

    const auto& views_k = p.views_by_relation[k];
    const std::string& rk = p.schema.relation(k).name;

    Counterexample ce;
    ce.k = k;
    ce.model = sat.model;
    for (std::size_t i = 0; i < m; ++i)
        if (i != k) {
            ce.instance_i.relations[p.schema.relation(i).name] = {ground.tuples[i]};
        }

    // I(R_k): witnesses of the views whose predicate holds on the ground
    // t_k, regardless of which branch of the disjunct the solver took.
    std::set<Tuple>& ik = ce.instance_i.relations[rk];
    for (std::size_t j = 0; j < views_k.size(); ++j) {
        if (!eval_predicate(views_k[j].predicate, ground.tuples[k])) continue;
        ik.insert(extract_tuple(skolem_witness_var(p, k, j), p.schema, sat.model));
    }

    ce.instance_i_prime = ce.instance_i;
    ce.instance_i_prime.relations[rk].insert(ground.tuples[k]);

    ce.witness_row = sub_tuple(join_tuples(ground), p.query.projection);

    // the three invariants, re-established on every run
    auto views = p.all_views();
    if (!views_equal(views, p.schema, ce.instance_i, ce.instance_i_prime))
        throw Error(ErrorCode::VerificationFailed,
                    "counterexample invariant violated: views disagree on (I, I')");
    Relation q_i = eval_query(p.query, p.schema, ce.instance_i);
    Relation q_ip = eval_query(p.query, p.schema, ce.instance_i_prime);
    if (!q_ip.count(ce.witness_row))
        throw Error(ErrorCode::VerificationFailed,
                    "counterexample invariant violated: witness row not in Q(I')");
    if (q_i.count(ce.witness_row))
        throw Error(ErrorCode::VerificationFailed,
                    "counterexample invariant violated: witness row also in Q(I)");
    const std::size_t n_k = views_k.size();
    if (ce.instance_i.tuples_of(rk).size() > n_k ||
        ce.instance_i_prime.tuples_of(rk).size() > n_k + 1 ||
        ce.instance_i_prime.total_tuples() > (m - 1) + n_k + 1)
        throw Error(ErrorCode::VerificationFailed,
                    "counterexample invariant violated: size bound exceeded");
    return ce;
}

nlohmann::json value_to_json(const Value& v) {
    switch (v.sort) {
        case Sort::Uninterpreted: return "#" + std::to_string(v.as_int());
        case Sort::Int: return v.as_int();
        case Sort::Bool: return v.as_bool();
        case Sort::String: return v.as_text();
    }
    return nullptr;
}

nlohmann::json tuple_to_json(const Tuple& t, bool qualified) {
    nlohmann::json obj = nlohmann::json::object();
    for (const auto& [col, val] : t.cells)
        obj[qualified ? to_string(col) : col.column] = value_to_json(val);
    return obj;
}

nlohmann::json instance_to_json(const Instance& inst, const Schema& schema) {
    nlohmann::json obj = nlohmann::json::object();
    for (const RelationDecl& rel : schema.relations) {
        nlohmann::json rows = nlohmann::json::array();
        for (const Tuple& t : inst.tuples_of(rel.name)) rows.push_back(tuple_to_json(t, false));
        obj[rel.name] = std::move(rows);
    }
    return obj;
}

nlohmann::json counterexample_to_json(const Counterexample& ce, const NormalizedProblem& p) {
    nlohmann::json obj;
    obj["k"] = ce.k + 1;
    obj["relation"] = p.schema.relation(ce.k).name;
    obj["instance_i"] = instance_to_json(ce.instance_i, p.schema);
    obj["instance_i_prime"] = instance_to_json(ce.instance_i_prime, p.schema);
    obj["witness_row"] = tuple_to_json(ce.witness_row, true);
    obj["model"] = tuple_to_json(ce.model, true);
    return obj;
}

} // namespace qdet
