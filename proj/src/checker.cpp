#include "qdet/checker.hpp"

#include <chrono>
#include <exception>

#include "qdet/formula.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qdet {

namespace {

RelationCheck solve_one(const NormalizedProblem& p, std::size_t i, const SolverConfig& cfg,
                        SatResult& out) {
    auto start = std::chrono::steady_clock::now();
    Formula f = build_negated_star(p, i);
    out = solve(f, cfg);
    std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    return {i, out.status, elapsed.count()};
}

} // namespace

Verdict check_determinacy(const NormalizedProblem& p, const CheckOptions& opts) {
    const std::size_t m = p.relation_count();
    Verdict verdict;

    if (!opts.check_all) {
        for (std::size_t i = 0; i < m; ++i) {
            SatResult sat;
            verdict.per_relation.push_back(solve_one(p, i, opts.solver, sat));
            if (sat.status == SatStatus::Sat) {
                verdict.status = Verdict::Status::NotDetermined;
                verdict.failing_relation = i;
                verdict.counterexample = construct_counterexample(p, i, sat);
                return verdict;
            }
        }
        return verdict;
    }

    std::vector<RelationCheck> checks(m);
    std::vector<SatResult> sats(m);
    std::exception_ptr failure;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (m > 1)
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(m); ++i) {
        try {
            checks[i] = solve_one(p, static_cast<std::size_t>(i), opts.solver, sats[i]);
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    verdict.per_relation = std::move(checks);
    for (std::size_t i = 0; i < m; ++i) {
        if (sats[i].status != SatStatus::Sat) continue;
        verdict.status = Verdict::Status::NotDetermined;
        verdict.failing_relation = i;
        verdict.counterexample = construct_counterexample(p, i, sats[i]);
        break;
    }
    return verdict;
}

nlohmann::json verdict_to_json(const Verdict& v, const NormalizedProblem& p) {
    nlohmann::json obj;
    obj["status"] = v.status == Verdict::Status::Determined ? "DETERMINED" : "NOT_DETERMINED";
    if (v.failing_relation) {
        obj["failing_relation"] = *v.failing_relation + 1;
        obj["failing_relation_name"] = p.schema.relation(*v.failing_relation).name;
    } else {
        obj["failing_relation"] = nullptr;
        obj["failing_relation_name"] = nullptr;
    }
    obj["counterexample"] =
        v.counterexample ? counterexample_to_json(*v.counterexample, p) : nlohmann::json(nullptr);
    nlohmann::json checks = nlohmann::json::array();
    for (const RelationCheck& c : v.per_relation) {
        nlohmann::json entry;
        entry["relation"] = c.relation + 1;
        entry["name"] = p.schema.relation(c.relation).name;
        entry["result"] = c.status == SatStatus::Sat ? "SAT" : "UNSAT";
        entry["seconds"] = c.seconds;
        checks.push_back(std::move(entry));
    }
    obj["per_relation"] = std::move(checks);
    return obj;
}

} // namespace qdet
