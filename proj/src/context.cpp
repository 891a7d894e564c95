#include "logt/context.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "logt/errors.hpp"

namespace logt {

using nlohmann::json;

static const std::set<std::string> kNodeKinds = {"concept", "rule", "condition", "exception"};
static const std::set<std::string> kEdgeRelations = {"has_condition", "has_conclusion",
                                                     "has_exception", "overrides",
                                                     "subclass_of",   "relates_to"};

static std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

static std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

// The selection reply is plain text; a fenced block, when present, is the
// selected excerpt and anything around it is chatter.
static std::string strip_fence(const std::string& completion) {
  size_t open = completion.find("```");
  if (open == std::string::npos) return completion;
  size_t content = completion.find('\n', open + 3);
  if (content == std::string::npos) return completion;
  size_t close = completion.find("```", content + 1);
  if (close == std::string::npos) return completion;
  return completion.substr(content + 1, close - content - 1);
}

SelectedGuidelines select_guidelines(const std::string& guidelines, const std::string& scenario,
                                     const std::string& hypothesis, Gateway& gw) {
  if (guidelines.empty() || scenario.empty() || hypothesis.empty())
    throw EmptyInput("select_guidelines: all inputs must be nonempty");

  SelectedGuidelines out;
  try {
    std::string completion = gw.complete_template("selection",
                                                  {{"guidelines", guidelines},
                                                   {"scenario", scenario},
                                                   {"hypothesis", hypothesis}},
                                                  Preset::Prediction);
    out.text = trim(strip_fence(completion));
  } catch (const Error& e) {
    out.warnings.push_back(std::string("selection call failed: ") + e.what());
  }
  if (out.text.empty()) {
    out.text = guidelines;
    out.fallback = true;
    out.warnings.push_back("selection fell back to the full guidelines");
  }
  return out;
}

ValidationReport validate_symbolic_context(SymbolicContext& ctx, const std::string& scenario,
                                           const std::string& hypothesis) {
  ValidationReport rep;

  std::set<std::string> ids;
  std::vector<OntologyNode> nodes;
  for (const OntologyNode& n : ctx.ontology.nodes) {
    if (n.id.empty()) {
      rep.dropped.push_back("node with empty id dropped");
      continue;
    }
    if (!kNodeKinds.count(n.kind)) {
      rep.dropped.push_back("node '" + n.id + "': kind '" + n.kind + "' not recognized");
      continue;
    }
    if (!ids.insert(n.id).second) {
      rep.dropped.push_back("duplicate node id '" + n.id + "'");
      continue;
    }
    nodes.push_back(n);
  }
  ctx.ontology.nodes = std::move(nodes);

  auto kind_of = [&](const std::string& id) -> std::string {
    for (const OntologyNode& n : ctx.ontology.nodes)
      if (n.id == id) return n.kind;
    return "";
  };

  std::vector<OntologyEdge> edges;
  for (const OntologyEdge& e : ctx.ontology.edges) {
    std::string tag = e.from + " -[" + e.relation + "]-> " + e.to;
    if (!kEdgeRelations.count(e.relation)) {
      rep.dropped.push_back("edge " + tag + ": relation not recognized");
      continue;
    }
    if (!ids.count(e.from) || !ids.count(e.to)) {
      rep.dropped.push_back("edge " + tag + ": unknown endpoint");
      continue;
    }
    if (e.relation == "overrides" && (kind_of(e.from) != "rule" || kind_of(e.to) != "rule")) {
      rep.dropped.push_back("edge " + tag + ": overrides must connect rule nodes");
      continue;
    }
    edges.push_back(e);
  }
  ctx.ontology.edges = std::move(edges);

  std::string haystack = lower(scenario + "\n" + hypothesis);
  for (const OntologyNode& n : ctx.ontology.nodes) haystack += "\n" + lower(n.label);
  bool soft = !(scenario.empty() && hypothesis.empty());

  std::vector<KnowledgeTriple> triples;
  for (size_t i = 0; i < ctx.triples.size(); ++i) {
    KnowledgeTriple t = ctx.triples[i];
    std::string tag = "triple #" + std::to_string(i);
    if (t.subject.empty() || t.predicate.empty() || t.object.empty()) {
      rep.dropped.push_back(tag + ": empty slot");
      continue;
    }
    if (!t.ontology_ref.empty() && !ids.count(t.ontology_ref)) {
      rep.warnings.push_back(tag + ": cleared dangling ontology_ref '" + t.ontology_ref + "'");
      t.ontology_ref.clear();
    }
    if (soft) {
      for (const std::string& slot : {t.subject, t.object}) {
        if (haystack.find(lower(slot)) == std::string::npos)
          rep.warnings.push_back(tag + ": '" + slot + "' not found in instance text");
      }
    }
    triples.push_back(std::move(t));
  }
  ctx.triples = std::move(triples);

  std::vector<std::string> queries;
  for (const std::string& q : ctx.nl_queries) {
    std::string tq = trim(q);
    if (tq.empty())
      rep.dropped.push_back("empty query dropped");
    else
      queries.push_back(tq);
  }
  ctx.nl_queries = std::move(queries);

  rep.kept_nodes = static_cast<int>(ctx.ontology.nodes.size());
  rep.kept_edges = static_cast<int>(ctx.ontology.edges.size());
  rep.kept_triples = static_cast<int>(ctx.triples.size());
  return rep;
}

SymbolicContext build_symbolic_context(const SelectedGuidelines& selected,
                                       const std::string& scenario, const std::string& hypothesis,
                                       Gateway& gw, ValidationReport* report) {
  if (selected.text.empty()) throw EmptyInput("build_symbolic_context: empty selection");

  json v;
  try {
    std::string completion = gw.complete_template("symbolic_context",
                                                  {{"guidelines", selected.text},
                                                   {"scenario", scenario},
                                                   {"hypothesis", hypothesis}},
                                                  Preset::Prediction);
    v = gw.extract_structured(completion, "symbolic_context");
  } catch (const Error& e) {
    throw ContextBuildFailed(std::string("symbolic-context extraction failed: ") + e.what());
  }

  SymbolicContext ctx;
  ctx.selected = selected;
  for (const json& n : v["ontology"]["nodes"])
    ctx.ontology.nodes.push_back({n["id"], n["kind"], n["label"]});
  for (const json& e : v["ontology"]["edges"])
    ctx.ontology.edges.push_back({e["from"], e["relation"], e["to"]});
  for (const json& t : v["triples"]) {
    KnowledgeTriple kt{t["subject"], t["predicate"], t["object"], ""};
    if (t.contains("ontology_ref")) kt.ontology_ref = t["ontology_ref"];
    ctx.triples.push_back(std::move(kt));
  }
  for (const json& q : v["nl_queries"]) ctx.nl_queries.push_back(q.get<std::string>());

  ValidationReport rep = validate_symbolic_context(ctx, scenario, hypothesis);
  if (ctx.ontology.nodes.empty() && ctx.triples.empty())
    throw ContextBuildFailed("extraction produced neither ontology nodes nor triples");
  if (ctx.nl_queries.empty()) {
    ctx.nl_queries.push_back("Does the following hold: " + hypothesis);
    rep.warnings.push_back("no queries returned; injected a hypothesis restatement");
  }
  if (report) *report = rep;
  return ctx;
}

SymbolicContext run_stage1(const InstanceRecord& instance, Gateway& gw,
                           ValidationReport* report) {
  SelectedGuidelines sel =
      select_guidelines(instance.guidelines, instance.scenario, instance.hypothesis, gw);
  return build_symbolic_context(sel, instance.scenario, instance.hypothesis, gw, report);
}

json to_json(const SymbolicContext& ctx) {
  json nodes = json::array();
  for (const OntologyNode& n : ctx.ontology.nodes)
    nodes.push_back({{"id", n.id}, {"kind", n.kind}, {"label", n.label}});
  json edges = json::array();
  for (const OntologyEdge& e : ctx.ontology.edges)
    edges.push_back({{"from", e.from}, {"relation", e.relation}, {"to", e.to}});
  json triples = json::array();
  for (const KnowledgeTriple& t : ctx.triples) {
    json jt = {{"subject", t.subject}, {"predicate", t.predicate}, {"object", t.object}};
    if (!t.ontology_ref.empty()) jt["ontology_ref"] = t.ontology_ref;
    triples.push_back(std::move(jt));
  }
  return {{"ontology", {{"nodes", nodes}, {"edges", edges}}},
          {"triples", triples},
          {"nl_queries", ctx.nl_queries},
          {"selected",
           {{"text", ctx.selected.text},
            {"rule_ids", ctx.selected.selected_rule_ids},
            {"fallback", ctx.selected.fallback}}}};
}

SymbolicContext symbolic_context_from_json(const json& v) {
  SymbolicContext ctx;
  for (const json& n : v.at("ontology").at("nodes"))
    ctx.ontology.nodes.push_back({n.at("id"), n.at("kind"), n.at("label")});
  for (const json& e : v.at("ontology").at("edges"))
    ctx.ontology.edges.push_back({e.at("from"), e.at("relation"), e.at("to")});
  for (const json& t : v.at("triples")) {
    KnowledgeTriple kt{t.at("subject"), t.at("predicate"), t.at("object"), ""};
    if (t.contains("ontology_ref")) kt.ontology_ref = t.at("ontology_ref");
    ctx.triples.push_back(std::move(kt));
  }
  for (const json& q : v.at("nl_queries")) ctx.nl_queries.push_back(q.get<std::string>());
  if (v.contains("selected")) {
    const json& s = v["selected"];
    ctx.selected.text = s.value("text", "");
    ctx.selected.fallback = s.value("fallback", false);
    if (s.contains("rule_ids"))
      for (const json& r : s["rule_ids"]) ctx.selected.selected_rule_ids.push_back(r);
  }
  return ctx;
}

std::string ontology_to_text(const Ontology& o) {
  std::ostringstream out;
  for (const OntologyNode& n : o.nodes)
    out << "- " << n.id << " (" << n.kind << "): " << n.label << "\n";
  for (const OntologyEdge& e : o.edges)
    out << "- " << e.from << " -[" << e.relation << "]-> " << e.to << "\n";
  return out.str();
}

std::string triple_text(const KnowledgeTriple& t) {
  return t.subject + " " + t.predicate + " " + t.object;
}

std::string triples_to_text(const std::vector<KnowledgeTriple>& triples) {
  std::ostringstream out;
  for (const KnowledgeTriple& t : triples) out << "- (" << triple_text(t) << ")\n";
  return out.str();
}

}  // namespace logt
