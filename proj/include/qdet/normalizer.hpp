#pragma once

#include <vector>

#include "qdet/parser.hpp"
#include "qdet/relational.hpp"

namespace qdet {

/// Views indexed by their source relation: views_by_relation[i] holds the
/// n_i project-select views over relation i, in input order.
struct NormalizedProblem {
    Schema schema;
    std::vector<std::vector<ViewDef>> views_by_relation;
    QueryDef query;

    std::size_t relation_count() const { return schema.relations.size(); }
    std::size_t view_count() const;
    std::vector<ViewDef> all_views() const;
};

/// Negation normal form with TRUE/FALSE folding: negations pushed onto
/// atoms, constants absorbed, nested same-kind connectives flattened.
Predicate nnf(const Predicate& p);

NormalizedProblem normalize(const Schema& schema, const std::vector<ViewDef>& views,
                            const QueryDef& query);
NormalizedProblem normalize(const Problem& p);

} // namespace qdet
