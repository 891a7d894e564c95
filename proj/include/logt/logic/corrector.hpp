#pragma once

#include <string>
#include <vector>

namespace logt::logic {

struct FixLogEntry {
  int line = 0;   // line number in the original text
  int rule = 0;   // 1..6
  std::string before;
  std::string after;
};

struct CorrectionResult {
  std::string text;
  std::vector<FixLogEntry> log;
};

// Deterministic syntactic repair for model-produced program text. Applies, in
// order: (1) strip code fences and prose lines, (2) append missing '.'
// terminators, (3) bare uppercase identifiers -> ?-variables, (4) name
// normalization (hyphens and interior spaces -> underscores, lowercase
// initial), (5) operator spellings (not/~/neg( -> \neg, overrides( ->
// \overrides(), (6) append up to two ')' when that makes the line parse.
// Total and idempotent: correcting corrected text logs no fixes.
CorrectionResult correct_syntax(const std::string& raw);

}  // namespace logt::logic
