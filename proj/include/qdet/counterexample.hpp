#pragma once

#include "qdet/normalizer.hpp"
#include "qdet/relational.hpp"
#include "qdet/solver.hpp"

#include "json.hpp"

namespace qdet {

/// A verified witness that the views do not determine the query: two finite
/// instances agreeing on every view whose query outputs differ by
/// witness_row.
struct Counterexample {
    std::size_t k = 0; // failing relation index (0-based)
    Instance instance_i;
    Instance instance_i_prime;
    Tuple witness_row;
    Tuple model; // the satisfying assignment it was built from
};

/// Builds the instance pair from a satisfying model of the negated
/// per-relation condition for relation k:
///
///   I(R_k)  = { w_j : theta_{k,j}(t_k) holds on the extracted t_k }
///   I(R_i)  = { t_i }                                  for i != k
///   I'      = I  except  I'(R_k) = I(R_k) + { t_k }
///
/// and re-establishes, computationally, that the views agree and the query
/// outputs differ before returning. A verification failure signals a bug in
/// the solver or builder, never a user error.
Counterexample construct_counterexample(const NormalizedProblem& p, std::size_t k,
                                        const SatResult& sat);

nlohmann::json counterexample_to_json(const Counterexample& ce, const NormalizedProblem& p);
nlohmann::json instance_to_json(const Instance& inst, const Schema& schema);
nlohmann::json tuple_to_json(const Tuple& t, bool qualified);
nlohmann::json value_to_json(const Value& v);

} // namespace qdet
