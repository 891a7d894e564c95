#pragma once

#include "logt/logic/ast.hpp"

namespace logt::logic {

// Ordered admission: statements are considered in source order and a
// statement is retained iff adding it keeps every program-level check
// satisfied (arity consistency, safety, override acyclicity, naf
// stratification). Queries are routed to compile_query instead and land in
// dropped with reason "query". Re-filtering the retained statements is the
// identity.
CompiledProgram compile_filter(const LogicProgram& program);

}  // namespace logt::logic
