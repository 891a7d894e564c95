#pragma once

#include "logt/logic/ast.hpp"

namespace logt::logic {

// Brute-force reference for solve. Same semantics, written against string
// representations with full statement rescans and its own stratum
// relaxation; shares no solving machinery with solve. Capped at 64 distinct
// ground literals occurring in the program (OracleBudgetExceeded beyond).
ConclusionSet oracle_solve(const std::vector<Statement>& ground_statements);

}  // namespace logt::logic
