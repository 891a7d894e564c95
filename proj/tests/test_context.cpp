#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <memory>

#include "logt/context.hpp"
#include "logt/errors.hpp"
#include "support/providers.hpp"
#include "support/tmpdir.hpp"

using namespace logt;
using testsupport::ScriptedProvider;
using testsupport::SequenceProvider;
using testsupport::TempDir;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::shared_ptr<const TemplateStore> repo_templates() {
  static auto store =
      std::make_shared<const TemplateStore>(fs::path(LOGT_REPO_DIR) / "templates");
  return store;
}

// Gateway wired to an in-test provider, caching into a fresh temp dir.
struct Rig {
  TempDir cache{"ctx"};
  std::shared_ptr<SequenceProvider> provider;
  std::unique_ptr<Gateway> gw;

  explicit Rig(std::vector<std::string> responses) {
    provider = std::make_shared<SequenceProvider>(std::move(responses));
    GatewayConfig cfg;
    cfg.model.model_id = "test-model";
    cfg.cache_dir = cache.path();
    cfg.backoff_base_ms = 0;
    cfg.max_attempts = 1;
    gw = std::make_unique<Gateway>(cfg, provider, repo_templates());
  }
};

const char* kScenario = "Dana's employment at Acme ended. Dana holds a company laptop.";
const char* kHypothesis = "Dana must return the laptop.";
const char* kGuidelines =
    "Employees must return company equipment when employment ends, "
    "unless the equipment was a gift.";

std::string context_payload() {
  return R"(Here is the extraction.
```json
{
  "ontology": {
    "nodes": [
      {"id": "r1", "kind": "rule", "label": "employees must return equipment"},
      {"id": "c1", "kind": "condition", "label": "employment ends"},
      {"id": "e1", "kind": "exception", "label": "equipment was a gift"}
    ],
    "edges": [
      {"from": "r1", "relation": "has_condition", "to": "c1"},
      {"from": "r1", "relation": "has_exception", "to": "e1"}
    ]
  },
  "triples": [
    {"subject": "dana", "predicate": "employment_ended", "object": "acme", "ontology_ref": "c1"},
    {"subject": "dana", "predicate": "holds", "object": "laptop"}
  ],
  "nl_queries": ["Must Dana return the laptop?"]
}
```
Done.)";
}

}  // namespace

TEST_CASE("shipped stage-1 templates take exactly the documented variables") {
  auto store = repo_templates();
  std::set<std::string> expected = {"guidelines", "hypothesis", "scenario"};
  CHECK(store->required_vars("selection") == expected);
  CHECK(store->required_vars("symbolic_context") == expected);
}

TEST_CASE("select_guidelines takes the fenced excerpt") {
  Rig rig({"Selected for you:\n```text\nClause 2: equipment must be returned.\n```\n"});
  SelectedGuidelines sel = select_guidelines(kGuidelines, kScenario, kHypothesis, *rig.gw);
  CHECK(sel.text == "Clause 2: equipment must be returned.");
  CHECK_FALSE(sel.fallback);
  CHECK(sel.warnings.empty());
}

TEST_CASE("select_guidelines without a fence uses the whole reply") {
  Rig rig({"  Employees must return company equipment.  "});
  SelectedGuidelines sel = select_guidelines(kGuidelines, kScenario, kHypothesis, *rig.gw);
  CHECK(sel.text == "Employees must return company equipment.");
}

TEST_CASE("selection failure falls back to the full guidelines") {
  Rig rig({});  // provider exhausted immediately
  SelectedGuidelines sel = select_guidelines(kGuidelines, kScenario, kHypothesis, *rig.gw);
  CHECK(sel.text == kGuidelines);
  CHECK(sel.fallback);
  REQUIRE_FALSE(sel.warnings.empty());
}

TEST_CASE("an empty selection reply also falls back") {
  Rig rig({"```text\n\n```"});
  SelectedGuidelines sel = select_guidelines(kGuidelines, kScenario, kHypothesis, *rig.gw);
  CHECK(sel.text == kGuidelines);
  CHECK(sel.fallback);
}

TEST_CASE("select_guidelines insists on nonempty inputs") {
  Rig rig({});
  CHECK_THROWS_AS(select_guidelines("", kScenario, kHypothesis, *rig.gw), EmptyInput);
}

TEST_CASE("build_symbolic_context parses a well-formed extraction") {
  Rig rig({context_payload()});
  SelectedGuidelines sel{kGuidelines, {}, false, {}};
  ValidationReport rep;
  SymbolicContext ctx = build_symbolic_context(sel, kScenario, kHypothesis, *rig.gw, &rep);

  REQUIRE(ctx.ontology.nodes.size() == 3);
  CHECK(ctx.ontology.nodes[0].id == "r1");
  CHECK(ctx.ontology.nodes[0].kind == "rule");
  REQUIRE(ctx.ontology.edges.size() == 2);
  REQUIRE(ctx.triples.size() == 2);
  CHECK(ctx.triples[0].ontology_ref == "c1");
  CHECK(ctx.triples[1].ontology_ref.empty());
  REQUIRE(ctx.nl_queries.size() == 1);
  CHECK(rep.dropped.empty());
  CHECK(rep.kept_nodes == 3);
  CHECK(ctx.selected.text == kGuidelines);
}

TEST_CASE("empty ontology and triples is a stage-1 failure") {
  Rig rig({R"({"ontology": {"nodes": [], "edges": []}, "triples": [], "nl_queries": ["q?"]})"});
  SelectedGuidelines sel{kGuidelines, {}, false, {}};
  CHECK_THROWS_AS(build_symbolic_context(sel, kScenario, kHypothesis, *rig.gw),
                  ContextBuildFailed);
}

TEST_CASE("unusable completions surface as ContextBuildFailed after repair") {
  Rig rig({"no json here", "still no json"});  // second reply consumed by the repair pass
  SelectedGuidelines sel{kGuidelines, {}, false, {}};
  CHECK_THROWS_AS(build_symbolic_context(sel, kScenario, kHypothesis, *rig.gw),
                  ContextBuildFailed);
}

TEST_CASE("missing queries are replaced by a hypothesis restatement") {
  Rig rig({R"({
    "ontology": {"nodes": [{"id": "r1", "kind": "rule", "label": "x"}], "edges": []},
    "triples": [], "nl_queries": []
  })"});
  SelectedGuidelines sel{kGuidelines, {}, false, {}};
  ValidationReport rep;
  SymbolicContext ctx = build_symbolic_context(sel, kScenario, kHypothesis, *rig.gw, &rep);
  REQUIRE(ctx.nl_queries.size() == 1);
  CHECK(ctx.nl_queries[0] == std::string("Does the following hold: ") + kHypothesis);
  CHECK_FALSE(rep.warnings.empty());
}

TEST_CASE("validator dedupes nodes and drops bad edges") {
  SymbolicContext ctx;
  ctx.ontology.nodes = {{"r1", "rule", "first"},
                        {"r1", "rule", "duplicate"},
                        {"c1", "condition", "cond"},
                        {"x1", "banana", "bad kind"}};
  ctx.ontology.edges = {{"r1", "has_condition", "c1"},
                        {"r1", "has_condition", "ghost"},
                        {"r1", "near", "c1"},
                        {"r1", "overrides", "c1"}};
  ValidationReport rep = validate_symbolic_context(ctx);

  REQUIRE(ctx.ontology.nodes.size() == 2);
  CHECK(ctx.ontology.nodes[0].label == "first");
  REQUIRE(ctx.ontology.edges.size() == 1);
  CHECK(ctx.ontology.edges[0].relation == "has_condition");
  CHECK(rep.dropped.size() == 5);
}

TEST_CASE("overrides edges between rule nodes survive validation") {
  SymbolicContext ctx;
  ctx.ontology.nodes = {{"r1", "rule", "a"}, {"r2", "rule", "b"}};
  ctx.ontology.edges = {{"r2", "overrides", "r1"}};
  ValidationReport rep = validate_symbolic_context(ctx);
  CHECK(ctx.ontology.edges.size() == 1);
  CHECK(rep.dropped.empty());
}

TEST_CASE("validator clears dangling triple refs but keeps the triple") {
  SymbolicContext ctx;
  ctx.ontology.nodes = {{"r1", "rule", "a"}};
  ctx.triples = {{"s", "p", "o", "r9"}, {"", "p", "o", ""}};
  ValidationReport rep = validate_symbolic_context(ctx);
  REQUIRE(ctx.triples.size() == 1);
  CHECK(ctx.triples[0].ontology_ref.empty());
  CHECK(rep.dropped.size() == 1);   // the empty-subject triple
  CHECK(rep.warnings.size() == 1);  // the cleared ref
}

TEST_CASE("soft text check reports unmatched triple slots without dropping") {
  SymbolicContext ctx;
  ctx.triples = {{"dana", "holds", "laptop", ""}, {"zorg", "pilots", "starship", ""}};
  ValidationReport rep = validate_symbolic_context(ctx, kScenario, kHypothesis);
  CHECK(ctx.triples.size() == 2);
  CHECK(rep.warnings.size() == 2);  // zorg and starship both unmatched
}

TEST_CASE("symbolic context serialization round-trips") {
  Rig rig({context_payload()});
  SelectedGuidelines sel{kGuidelines, {}, false, {}};
  SymbolicContext ctx = build_symbolic_context(sel, kScenario, kHypothesis, *rig.gw);

  json j = to_json(ctx);
  SymbolicContext back = symbolic_context_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(back.ontology.nodes.size() == ctx.ontology.nodes.size());
  CHECK(back.selected.text == ctx.selected.text);
}

TEST_CASE("run_stage1 chains selection and extraction") {
  InstanceRecord inst;
  inst.id = "t1";
  inst.guidelines = kGuidelines;
  inst.scenario = kScenario;
  inst.hypothesis = kHypothesis;

  Rig rig({"```text\n" + std::string(kGuidelines) + "\n```", context_payload()});
  SymbolicContext ctx = run_stage1(inst, *rig.gw);
  CHECK(ctx.selected.text == kGuidelines);
  CHECK(ctx.ontology.nodes.size() == 3);
  CHECK(rig.provider->next == 2);
}

TEST_CASE("run_stage1 replays byte-identically from cache") {
  InstanceRecord inst;
  inst.id = "t1";
  inst.guidelines = kGuidelines;
  inst.scenario = kScenario;
  inst.hypothesis = kHypothesis;

  TempDir cache("ctx_replay");
  GatewayConfig cfg;
  cfg.model.model_id = "test-model";
  cfg.cache_dir = cache.path();
  cfg.backoff_base_ms = 0;
  cfg.max_attempts = 1;

  std::string first_dump;
  {
    auto provider = std::make_shared<SequenceProvider>(std::vector<std::string>{
        "```text\n" + std::string(kGuidelines) + "\n```", context_payload()});
    Gateway gw(cfg, provider, repo_templates());
    first_dump = to_json(run_stage1(inst, gw)).dump();
  }
  {
    auto starved = std::make_shared<SequenceProvider>(std::vector<std::string>{});
    Gateway gw(cfg, starved, repo_templates());
    std::string second_dump = to_json(run_stage1(inst, gw)).dump();
    CHECK(second_dump == first_dump);
    CHECK(gw.stats().cache_hits == 2);
    CHECK(gw.stats().provider_calls == 0);
  }
}

TEST_CASE("ontology and triple text renderings are stable") {
  Ontology o;
  o.nodes = {{"r1", "rule", "return equipment"}};
  o.edges = {{"r1", "has_condition", "r1"}};
  CHECK(ontology_to_text(o) ==
        "- r1 (rule): return equipment\n- r1 -[has_condition]-> r1\n");
  std::vector<KnowledgeTriple> ts = {{"dana", "holds", "laptop", ""}};
  CHECK(triples_to_text(ts) == "- (dana holds laptop)\n");
  CHECK(triple_text(ts[0]) == "dana holds laptop");
}
