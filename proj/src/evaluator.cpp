#include "qdet/evaluator.hpp"

namespace qdet {

Relation eval_view(const ViewDef& v, const Schema& schema, const Instance& inst) {
    Relation out;
    const auto& tuples = inst.tuples_of(schema.relation(v.source).name);
    for (const Tuple& t : tuples)
        if (eval_predicate(v.predicate, t)) out.insert(sub_tuple(t, v.projection));
    return out;
}

namespace {

void join_rec(const QueryDef& q, const Schema& schema, const Instance& inst, std::size_t depth,
              Tuple& acc, Relation& out) {
    if (depth == schema.relations.size()) {
        if (eval_predicate(q.predicate, acc)) out.insert(sub_tuple(acc, q.projection));
        return;
    }
    for (const Tuple& t : inst.tuples_of(schema.relations[depth].name)) {
        acc.cells.insert(t.cells.begin(), t.cells.end());
        join_rec(q, schema, inst, depth + 1, acc, out);
        for (const auto& [col, _] : t.cells) acc.cells.erase(col);
    }
}

} // namespace

Relation eval_query(const QueryDef& q, const Schema& schema, const Instance& inst) {
    Relation out;
    Tuple acc;
    join_rec(q, schema, inst, 0, acc, out);
    return out;
}

bool views_equal(std::span<const ViewDef> views, const Schema& schema, const Instance& a,
                 const Instance& b) {
    for (const ViewDef& v : views)
        if (eval_view(v, schema, a) != eval_view(v, schema, b)) return false;
    return true;
}

} // namespace qdet
