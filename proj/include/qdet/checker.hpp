#pragma once

#include <optional>
#include <vector>

#include "qdet/counterexample.hpp"
#include "qdet/normalizer.hpp"
#include "qdet/solver.hpp"

#include "json.hpp"

namespace qdet {

struct RelationCheck {
    std::size_t relation = 0; // 0-based schema index
    SatStatus status = SatStatus::Unsat;
    double seconds = 0.0;
};

/// DETERMINED iff the negated per-relation condition is UNSAT for every
/// relation; otherwise the verdict carries the failing relation and a
/// verified counterexample.
struct Verdict {
    enum class Status { Determined, NotDetermined };

    Status status = Status::Determined;
    std::optional<std::size_t> failing_relation;
    std::optional<Counterexample> counterexample;
    std::vector<RelationCheck> per_relation; // ordered by relation index
};

struct CheckOptions {
    SolverConfig solver;
    /// Solve every relation instead of stopping at the first satisfiable
    /// one; per-relation checks may run concurrently.
    bool check_all = false;
};

Verdict check_determinacy(const NormalizedProblem& p, const CheckOptions& opts);

nlohmann::json verdict_to_json(const Verdict& v, const NormalizedProblem& p);

} // namespace qdet
