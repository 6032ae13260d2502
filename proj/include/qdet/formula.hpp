#pragma once

#include <string>
#include <vector>

#include "qdet/normalizer.hpp"
#include "qdet/relational.hpp"

namespace qdet {

/// A logical tuple variable ranging over one relation: one sort-tagged
/// column variable per declared column. Column variables are addressed as
/// ColumnRef{label, column}, so predicates instantiated on tuple variables
/// reuse the plain Predicate machinery.
struct TupleVar {
    enum class Role { BaseTuple, SkolemWitness };

    std::string label;
    std::size_t relation = 0; // schema index it ranges over
    Role role = Role::BaseTuple;
    std::size_t view = 0; // j, meaningful for SkolemWitness only
    std::vector<ColumnDecl> columns;

    ColumnRef column_ref(const std::string& column) const { return {label, column}; }

    bool operator==(const TupleVar&) const = default;
};

/// Quantifier-free formula over tuple-variable columns and constants.
/// `vars` is the exact free-variable set, even when folding removed every
/// occurrence of some variable from the body.
struct Formula {
    Predicate body;
    std::vector<TupleVar> vars;

    const TupleVar* find_var(std::string_view label) const;
};

/// The base tuple variables t1..tm, one per relation.
std::vector<TupleVar> base_tuple_vars(const NormalizedProblem& p);

/// The skolem witness for the j-th view of relation i (both 0-based);
/// labeled w<i+1>_<j+1> so distinct disjuncts never share variables.
TupleVar skolem_witness_var(const NormalizedProblem& p, std::size_t i, std::size_t j);

/// Rewrites every column reference R_k.C to label_by_relation[k].C.
Predicate instantiate(const Predicate& pred, const Schema& schema,
                      const std::vector<std::string>& label_by_relation);

/// Phi_{i,j}(t, t'): the witness satisfies view j's predicate and agrees
/// with t on the view's projection columns.
Formula build_phi(const NormalizedProblem& p, std::size_t i, std::size_t j, const TupleVar& t,
                  const TupleVar& t_prime);

/// Psi_{i,j}(base, t'): substituting t' for position i preserves the query
/// predicate and the query's projected output. Equalities between a column
/// variable and itself fold to TRUE.
Formula build_psi(const NormalizedProblem& p, std::size_t i, std::size_t j,
                  const std::vector<TupleVar>& base, const TupleVar& t_prime);

/// The skolemized negation of the per-relation determinacy condition:
///
///   theta(t) and AND_j [ not theta_{i,j}(t_i)
///                        or (Phi_{i,j}(t_i, w_j) and not Psi_{i,j}(t, w_j)) ]
///
/// with one fresh witness w_j per disjunct. Satisfiable iff the views fail
/// to determine the query at relation i.
Formula build_negated_star(const NormalizedProblem& p, std::size_t i);

} // namespace qdet
