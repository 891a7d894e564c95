#pragma once

#include <string>
#include <vector>

#include "logt/core.hpp"
#include "logt/gateway.hpp"

namespace logt {

// Stage 1 output: the guideline excerpt X' actually shown to later stages.
struct SelectedGuidelines {
  std::string text;
  std::vector<std::string> selected_rule_ids;
  bool fallback = false;  // true when selection degraded to the full guidelines
  std::vector<std::string> warnings;
};

struct OntologyNode {
  std::string id;
  std::string kind;  // concept | rule | condition | exception
  std::string label;
};

struct OntologyEdge {
  std::string from;
  std::string relation;  // has_condition | has_conclusion | has_exception |
                         // overrides | subclass_of | relates_to
  std::string to;
};

struct Ontology {
  std::vector<OntologyNode> nodes;
  std::vector<OntologyEdge> edges;
};

struct KnowledgeTriple {
  std::string subject;
  std::string predicate;
  std::string object;
  std::string ontology_ref;  // empty = untagged
};

struct SymbolicContext {
  Ontology ontology;
  std::vector<KnowledgeTriple> triples;
  std::vector<std::string> nl_queries;
  SelectedGuidelines selected;
};

struct ValidationReport {
  int kept_nodes = 0;
  int kept_edges = 0;
  int kept_triples = 0;
  std::vector<std::string> dropped;   // hard drops with reasons
  std::vector<std::string> warnings;  // soft findings (cleared refs, unmatched slots)
};

// One selection call. Never fatal: on any failure the full guidelines come
// back with fallback=true and a warning.
SelectedGuidelines select_guidelines(const std::string& guidelines, const std::string& scenario,
                                     const std::string& hypothesis, Gateway& gw);

// One combined extraction call producing ontology + triples + queries.
// Throws ContextBuildFailed only when ontology and triples are both empty
// after the gateway's repair pass.
SymbolicContext build_symbolic_context(const SelectedGuidelines& selected,
                                       const std::string& scenario, const std::string& hypothesis,
                                       Gateway& gw, ValidationReport* report = nullptr);

// Enforcement point for the type invariants: dedupes node ids, drops edges
// with unknown endpoints or vocabulary, drops overrides edges between
// non-rule nodes, clears dangling triple refs. Soft text checks run only
// when scenario/hypothesis are given.
ValidationReport validate_symbolic_context(SymbolicContext& ctx, const std::string& scenario = "",
                                           const std::string& hypothesis = "");

// Selection followed by extraction; the stage-1 entry point used by the
// pipeline drivers.
SymbolicContext run_stage1(const InstanceRecord& instance, Gateway& gw,
                           ValidationReport* report = nullptr);

nlohmann::json to_json(const SymbolicContext& ctx);
SymbolicContext symbolic_context_from_json(const nlohmann::json& v);

// Plain-text renderings used in downstream prompts and provenance linking.
std::string ontology_to_text(const Ontology& o);
std::string triples_to_text(const std::vector<KnowledgeTriple>& triples);
std::string triple_text(const KnowledgeTriple& t);

}  // namespace logt
