#pragma once

#include <string>

#include "logt/context.hpp"
#include "logt/gateway.hpp"
#include "logt/synthesizer.hpp"

namespace logt {

// Which context halves the final prompt carries.
enum class ContextMask { Full, SymbolicOnly, LogicOnly };

struct ReasonerConfig {
  // Character guard on the rendered prompt. When over budget, triples are
  // dropped last-first, then ontology edges; P' and answers are never cut.
  size_t prompt_char_budget = 60000;
};

struct GroundedInput {
  SymbolicContext csym;
  LogicContext clog;
  std::string hypothesis;
};

struct GroundedResult {
  Label label = Label::Neutral;
  std::string raw_trace;   // the full completion, steps and all
  std::string prompt_hash; // sha256 of the rendered prompt
  int dropped_triples = 0;
  int dropped_edges = 0;
};

// Renders the grounded-evaluation prompt for the given mask, applying the
// truncation policy. Exposed separately so prompt-content invariants are
// directly testable.
std::string render_grounded_prompt(const GroundedInput& input, Gateway& gw, ContextMask mask,
                                   const ReasonerConfig& cfg = {}, int* dropped_triples = nullptr,
                                   int* dropped_edges = nullptr);

// One prediction-preset call plus label extraction. Throws EvaluationFailed
// when no label can be extracted even after the gateway's repair pass.
GroundedResult evaluate_hypothesis(const GroundedInput& input, Gateway& gw,
                                   ContextMask mask = ContextMask::Full,
                                   const ReasonerConfig& cfg = {});

// prediction.json payload: {label, method, prompt_hash, raw_trace}.
nlohmann::json prediction_artifact(const GroundedResult& result, Method method);

Method mask_method(ContextMask mask);

}  // namespace logt
