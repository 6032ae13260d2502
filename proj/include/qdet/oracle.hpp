#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "qdet/normalizer.hpp"
#include "qdet/relational.hpp"

namespace qdet {

struct OracleBounds {
    std::size_t domain_size = 2; // distinct values per sort
    std::size_t max_tuples = 2;  // per-relation tuple-set size cap
    /// Upper bound on the number of candidate instances enumerated; crossing
    /// it raises BUDGET_EXCEEDED before any work is done.
    std::uint64_t work_budget = 500000;
};

enum class OracleMode {
    Parallel,  // grouped scan, OpenMP over the instance range
    Serial,    // grouped scan, single thread
    Reference, // naive instance-pair loop through the evaluator
};

struct OracleResult {
    bool determined_up_to_bounds = false;
    OracleBounds bounds;
    std::uint64_t instances_enumerated = 0;
    /// Present iff not determined: two instances over the bounded domain
    /// that agree on every view but disagree on the query.
    std::optional<std::pair<Instance, Instance>> counterexample;
};

/// Brute-force ground truth for the determinacy definition, restricted to
/// instances whose relations draw at most max_tuples tuples over a bounded
/// value domain (#0..#(d-1) for uninterpreted columns, 0..d-1 for int,
/// false/true for bool, declared literals then fresh values for string).
///
/// This deliberately ignores the formula machinery: instances are grouped
/// by their view outputs and the query output is compared within a group.
/// Every mode enumerates instances in the same order and reports the same
/// first violating pair; Reference exists as the obviously-correct baseline
/// for differential tests and the benchmark.
OracleResult oracle_check(const NormalizedProblem& p, const OracleBounds& bounds,
                          OracleMode mode = OracleMode::Parallel);

} // namespace qdet
