#pragma once

#include <set>
#include <span>

#include "qdet/relational.hpp"

namespace qdet {

using Relation = std::set<Tuple>;

/// { t[U] : t in inst(R_i), theta(t) } under set semantics.
Relation eval_view(const ViewDef& v, const Schema& schema, const Instance& inst);

/// { t[U] : t in inst(R_1) x ... x inst(R_m), theta(t) }, deduplicated.
/// Naive nested-loop cross product; instances here are counterexample-sized.
Relation eval_query(const QueryDef& q, const Schema& schema, const Instance& inst);

/// True iff every view evaluates to the same relation on both instances.
bool views_equal(std::span<const ViewDef> views, const Schema& schema, const Instance& a,
                 const Instance& b);

} // namespace qdet
