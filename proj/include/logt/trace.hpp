#pragma once

#include <optional>
#include <string>
#include <vector>

#include "logt/context.hpp"
#include "logt/core.hpp"
#include "logt/gateway.hpp"

namespace logt {

enum class StepType {
  FactLookup,
  ApplyRule,
  CheckCondition,
  ResolveConflictOverride,
  ContradictionDetected,
  ConcludeLabel,
};

std::string to_string(StepType t);
std::optional<StepType> try_parse_step_type(const std::string& text);

struct TraceStep {
  int index = 0;
  StepType step_type = StepType::CheckCondition;
  std::string text;
  // Provenance is typed: fact_lookup links to a triple, apply_rule to an
  // ontology rule node. Both absent otherwise.
  std::optional<int> triple_index;
  std::optional<std::string> node_id;
};

struct OrganizedTrace {
  std::string instance_id;
  Method method = Method::LogtFull;
  std::vector<TraceStep> steps;
  std::vector<std::string> diagnostics;  // coercions, fallbacks
};

struct ReasonVerdict {
  std::string instance_id;
  bool reasoning_correct = false;
  bool prediction_correct = false;  // mechanical: predicted == gold
  std::string judge_rationale;
};

// One reasoning-preset call sorting the raw trace into the six types.
// Unknown types coerce to check_condition; mid-trace conclude_label steps
// are coerced too, so the invariant (at most one, last) always holds. On
// organize failure the whole raw text becomes a single conclude_label step.
// Total except for empty input (EmptyInput).
OrganizedTrace organize_trace(const std::string& raw, Gateway& gw,
                              const std::string& instance_id = "",
                              Method method = Method::LogtFull);

// Attaches provenance by token Jaccard >= 0.5 against triple texts
// (fact_lookup) and rule-node labels (apply_rule); ties break to the lowest
// index. Pure.
OrganizedTrace link_provenance(const OrganizedTrace& trace, const SymbolicContext& csym);

// Judge call (reasoning preset). The reply must end with a VERDICT line;
// anything else is JudgeFailed, defaulting to reasoning_correct=false.
// prediction_correct is computed locally, never by the judge.
ReasonVerdict judge_reason_correctness(const OrganizedTrace& trace, const SymbolicContext& csym,
                                       Label gold, Label predicted, Gateway& gw);

// Mean step counts per type and overall, grouped by method. Exact integer
// arithmetic; means emitted as 2-decimal half-up strings. EmptyInput when
// the list is empty.
nlohmann::json aggregate_step_stats(const std::vector<OrganizedTrace>& traces);

// 2x2 counts (reasoning +/- x prediction +/-) with row-normalized integer
// percentages (half-up). EmptyInput when empty.
nlohmann::json confusion(const std::vector<ReasonVerdict>& verdicts);

nlohmann::json to_json(const OrganizedTrace& t);
OrganizedTrace trace_from_json(const nlohmann::json& v);
nlohmann::json to_json(const ReasonVerdict& v);
ReasonVerdict verdict_from_json(const nlohmann::json& v);

// Tokenizer used for provenance matching: lowercase, split on non-alphanumerics
// and camelCase boundaries. Exposed for tests.
std::vector<std::string> provenance_tokens(const std::string& text);

}  // namespace logt
