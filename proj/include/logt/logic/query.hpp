#pragma once

#include "logt/logic/ast.hpp"

namespace logt::logic {

struct QueryLimits {
  size_t answer_cap = 100;
  size_t ground_cap = 200000;
};

// Parses text that must hold exactly one well-formed query statement.
// Throws QueryCompileError otherwise.
Statement parse_query_text(const std::string& text);

// Validates a query against a compiled program: every variable must occur in
// a positive non-naf conjunct, and predicates known to the program must be
// used at their established arity. Throws QueryCompileError.
void compile_query(const CompiledProgram& compiled, const Statement& query);

// Enumerates bindings over the Herbrand universe extended with the query's
// own constants. A binding holds when every positive conjunct lands in
// defeasible and every naf conjunct lands in refuted. Bindings are sorted
// (variables by name, values in term order); at most answer_cap are kept,
// with truncated set if more exist. A ground query yields [{}] or [].
AnswerSet answer_query(const CompiledProgram& compiled, const Statement& query,
                       const QueryLimits& limits = {});

}  // namespace logt::logic
