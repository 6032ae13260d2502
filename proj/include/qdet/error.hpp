#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qdet {

enum class ErrorCode {
    UnknownColumn,
    UnboundColumn,
    IndexOutOfRange,
    SortMismatch,
    UnsupportedTheory,
    SolverTimeout,
    ExternalSolverFailure,
    VerificationFailed,
    BudgetExceeded,
};

std::string_view error_code_name(ErrorCode code);

/// Thrown on contract violations and environment failures; parse problems are
/// reported as diagnostics instead (see parser.hpp).
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace qdet
