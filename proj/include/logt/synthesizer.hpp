#pragma once

#include <string>
#include <vector>

#include "logt/context.hpp"
#include "logt/gateway.hpp"
#include "logt/logic/engine.hpp"

namespace logt {

// Stage-2 LLM output split into its three sections. Concatenation order is
// fixed: facts, then rules, then queries.
struct SynthesisBundle {
  std::string facts_text;
  std::string rules_text;
  std::string queries_text;
  std::string syntax_bank_id = "syntax_bank";
};

// C_log: the verified program P' plus its query answers A.
struct LogicContext {
  logic::CompiledProgram program;
  std::vector<logic::AnswerSet> answers;
  bool query_fallback = false;  // true iff zero queries compiled
  std::vector<logic::FixLogEntry> fix_log;
  std::vector<logic::DropInfo> drop_log;  // compile drops + per-query failures
  std::string raw_text;                   // sections as synthesized
  std::string corrected_text;             // after correct_syntax
};

// One LLM call with the synthesis template (syntax bank embedded). Throws
// SynthesisFailed when no section can be isolated even after one repair
// re-prompt.
SynthesisBundle synthesize_program(const SymbolicContext& ctx, Gateway& gw);

// Pure engine half of stage 2: correct, parse, compile-and-filter, then
// compile and run each query independently. Total: engine failures land in
// drop_log, never throw.
LogicContext compile_bundle(const SynthesisBundle& bundle,
                            const logic::EngineConfig& cfg = {});

// synthesize_program followed by compile_bundle.
LogicContext build_logic_context(const SymbolicContext& ctx, Gateway& gw,
                                 const logic::EngineConfig& cfg = {});

// Canonical text of the retained program, one statement per line.
std::string retained_text(const logic::CompiledProgram& program);

// Human-readable answer lines for prompts: "?- q(?X).  ->  ?X = a" with
// yes/no for ground queries.
std::string answers_text(const std::vector<logic::AnswerSet>& answers);
std::string answer_set_text(const logic::AnswerSet& a);

nlohmann::json to_json(const LogicContext& ctx);

}  // namespace logt
