#pragma once

#include <optional>
#include <string>

#include "qdet/formula.hpp"
#include "qdet/relational.hpp"

namespace qdet {

enum class SatStatus { Sat, Unsat };

struct SatResult {
    SatStatus status = SatStatus::Unsat;
    /// Total assignment of every tuple-variable column, keyed by
    /// ColumnRef{var label, column}; present iff status == Sat. Verified
    /// against the formula before being returned.
    Tuple model;
};

enum class SolverBackend { Builtin, External };

struct SolverConfig {
    SolverBackend backend = SolverBackend::Builtin;
    /// Shell command reading SMT-LIB2 on stdin and answering sat/unsat plus
    /// a (get-model) dump on stdout, e.g. "z3 -in". Required for External.
    std::string external_command;
    double time_limit_seconds = 60.0; // 0 = no limit; applies to External only
};

/// Builtin backend: propositional enumeration of the atom set with a
/// union-find consistency check per assignment. Handles Eq atoms over
/// uninterpreted, string and bool sorts (at most 30 atoms); anything else
/// is rejected with UNSUPPORTED_THEORY and belongs to the external path.
SatResult solve(const Formula& f, const SolverConfig& cfg);

/// Deterministic SMT-LIB2 script: sort and constant declarations, pairwise
/// distinctness of literal constants, one assert, (check-sat), (get-model).
std::string emit_smtlib(const Formula& f);

/// Interprets solver output for a script produced by emit_smtlib(f).
/// Abstract sort values are renamed to canonical fresh constants #0, #1, ...
/// in first-occurrence order over the formula's variables.
SatResult parse_model(const std::string& solver_output, const Formula& f);

} // namespace qdet
