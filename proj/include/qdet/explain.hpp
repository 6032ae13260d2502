#pragma once

#include <string>

#include "qdet/normalizer.hpp"

namespace qdet {

/// Renders, per relation, the quantified determinacy condition together
/// with its skolemized negation, with the Phi/Psi sub-formulas expanded.
/// `latex` switches the connectives to math-mode macros.
std::string render_conditions(const NormalizedProblem& p, bool latex);

} // namespace qdet
