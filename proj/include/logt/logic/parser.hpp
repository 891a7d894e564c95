#pragma once

#include <string>

#include "logt/logic/ast.hpp"

namespace logt::logic {

// Parses program text into statements. Parsing never throws: a malformed
// statement becomes a diagnostic and the parser resynchronizes at the next
// '.'. Well-formed statements around a bad one are kept.
LogicProgram parse_program(const std::string& text);

}  // namespace logt::logic
