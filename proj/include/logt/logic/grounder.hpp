#pragma once

#include "logt/logic/ast.hpp"

namespace logt::logic {

// Herbrand universe of a compiled program: every constant and integer term in
// the retained statements, sorted, deduplicated.
std::vector<Term> herbrand_universe(const CompiledProgram& compiled);

// Instantiates every retained statement under all substitutions over the
// universe (program constants plus extra_constants). Ground statements pass
// through unchanged, so grounding a ground program is the identity. Within
// one source statement, instantiations enumerate variables in order of first
// appearance, rightmost varying fastest, constants in sorted order.
// Throws GroundingBudgetExceeded when the total instantiation count would
// exceed cap.
std::vector<Statement> ground(const CompiledProgram& compiled,
                              const std::vector<Term>& extra_constants = {},
                              size_t cap = 200000);

}  // namespace logt::logic
