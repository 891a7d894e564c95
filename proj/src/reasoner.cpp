#include "logt/reasoner.hpp"

#include "logt/errors.hpp"

namespace logt {

Method mask_method(ContextMask mask) {
  switch (mask) {
    case ContextMask::Full: return Method::LogtFull;
    case ContextMask::SymbolicOnly: return Method::LogtSgc;
    case ContextMask::LogicOnly: return Method::LogtLc;
  }
  return Method::LogtFull;
}

static const char* mask_template(ContextMask mask) {
  switch (mask) {
    case ContextMask::Full: return "grounded_full";
    case ContextMask::SymbolicOnly: return "grounded_sgc";
    case ContextMask::LogicOnly: return "grounded_lc";
  }
  return "grounded_full";
}

static std::string or_none(std::string text) {
  return text.empty() ? std::string("(none)\n") : text;
}

std::string render_grounded_prompt(const GroundedInput& input, Gateway& gw, ContextMask mask,
                                   const ReasonerConfig& cfg, int* dropped_triples,
                                   int* dropped_edges) {
  size_t triples = input.csym.triples.size();
  size_t edges = input.csym.ontology.edges.size();

  auto render = [&](size_t ntriples, size_t nedges) {
    Ontology ont = input.csym.ontology;
    ont.edges.resize(nedges);
    std::vector<KnowledgeTriple> ts(input.csym.triples.begin(),
                                    input.csym.triples.begin() + ntriples);
    std::map<std::string, std::string> vars = {
        {"guidelines", or_none(input.csym.selected.text)},
        {"hypothesis", input.hypothesis}};
    if (mask != ContextMask::LogicOnly) {
      vars["ontology"] = or_none(ontology_to_text(ont));
      vars["triples"] = or_none(triples_to_text(ts));
    }
    if (mask != ContextMask::SymbolicOnly) {
      vars["program"] = or_none(retained_text(input.clog.program));
      vars["answers"] = or_none(answers_text(input.clog.answers));
    }
    return gw.render(mask_template(mask), vars);
  };

  std::string prompt = render(triples, edges);
  if (mask != ContextMask::LogicOnly) {
    while (prompt.size() > cfg.prompt_char_budget && triples > 0) {
      --triples;
      prompt = render(triples, edges);
    }
    while (prompt.size() > cfg.prompt_char_budget && edges > 0) {
      --edges;
      prompt = render(triples, edges);
    }
  }
  if (dropped_triples)
    *dropped_triples = static_cast<int>(input.csym.triples.size() - triples);
  if (dropped_edges)
    *dropped_edges = static_cast<int>(input.csym.ontology.edges.size() - edges);
  return prompt;
}

GroundedResult evaluate_hypothesis(const GroundedInput& input, Gateway& gw, ContextMask mask,
                                   const ReasonerConfig& cfg) {
  GroundedResult result;
  std::string prompt = render_grounded_prompt(input, gw, mask, cfg, &result.dropped_triples,
                                              &result.dropped_edges);
  result.prompt_hash = sha256_hex(prompt);
  result.raw_trace = gw.complete(prompt, Preset::Prediction);
  try {
    nlohmann::json v = gw.extract_structured(result.raw_trace, "label_only");
    result.label = parse_label(v["label"].get<std::string>());
  } catch (const ExtractionFailed& e) {
    throw EvaluationFailed(std::string("no label in the grounded reply: ") + e.what());
  }
  return result;
}

nlohmann::json prediction_artifact(const GroundedResult& result, Method method) {
  return {{"label", to_string(result.label)},
          {"method", to_string(method)},
          {"prompt_hash", result.prompt_hash},
          {"raw_trace", result.raw_trace}};
}

}  // namespace logt
