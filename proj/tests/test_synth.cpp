#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "logt/errors.hpp"
#include "logt/synthesizer.hpp"
#include "support/rig.hpp"

using namespace logt;
using testsupport::Rig;
using testsupport::repo_templates;
using nlohmann::json;

namespace {

SymbolicContext tiny_context() {
  SymbolicContext ctx;
  ctx.ontology.nodes = {{"r1", "rule", "birds eat worms"},
                        {"e1", "exception", "penguins do not"}};
  ctx.ontology.edges = {{"r1", "has_exception", "e1"}};
  ctx.triples = {{"tweety", "is_a", "bird", ""}, {"opus", "is_a", "penguin", ""}};
  ctx.nl_queries = {"Who eats worms?"};
  ctx.selected.text = "Birds eat worms. Penguins are birds but do not eat worms.";
  return ctx;
}

const char* kBirdCompletion = R"(Here is the program.

```facts
bird(tweety).
penguin(opus).
```

```rules
bird(?X) :- penguin(?X).
@{bird_rule} eats_worms(?X) :- bird(?X).
@{penguin_rule} \neg eats_worms(?X) :- penguin(?X).
\overrides(penguin_rule, bird_rule).
```

```queries
?- eats_worms(?X).
```
)";

SynthesisBundle bird_bundle() {
  SynthesisBundle b;
  b.facts_text = "bird(tweety).\npenguin(opus).\n";
  b.rules_text =
      "bird(?X) :- penguin(?X).\n"
      "@{bird_rule} eats_worms(?X) :- bird(?X).\n"
      "@{penguin_rule} \\neg eats_worms(?X) :- penguin(?X).\n"
      "\\overrides(penguin_rule, bird_rule).\n";
  b.queries_text = "?- eats_worms(?X).\n";
  return b;
}

}  // namespace

TEST_CASE("shipped stage-2 templates take the documented variables") {
  auto store = repo_templates();
  CHECK(store->required_vars("synthesis") ==
        std::set<std::string>{"nl_queries", "ontology", "syntax_bank", "triples"});
  CHECK(store->required_vars("synthesis_repair") == std::set<std::string>{"previous"});
  CHECK(store->required_vars("syntax_bank").empty());
}

TEST_CASE("synthesize_program splits the three fenced sections") {
  Rig rig({kBirdCompletion});
  SynthesisBundle b = synthesize_program(tiny_context(), *rig.gw);
  CHECK(b.facts_text == "bird(tweety).\npenguin(opus).\n");
  CHECK(b.rules_text.find("\\overrides(penguin_rule, bird_rule).") != std::string::npos);
  CHECK(b.queries_text == "?- eats_worms(?X).\n");
}

TEST_CASE("a sectionless reply gets one repair re-prompt") {
  Rig rig({"I would rather chat about birds.", kBirdCompletion});
  SynthesisBundle b = synthesize_program(tiny_context(), *rig.gw);
  CHECK(b.facts_text.find("bird(tweety).") != std::string::npos);
  CHECK(rig.provider->next == 2);
}

TEST_CASE("synthesis fails when the repair also lacks sections") {
  Rig rig({"prose", "more prose"});
  CHECK_THROWS_AS(synthesize_program(tiny_context(), *rig.gw), SynthesisFailed);
}

TEST_CASE("one present section is enough") {
  Rig rig({"```facts\np(a).\n```\nno rules today"});
  SynthesisBundle b = synthesize_program(tiny_context(), *rig.gw);
  CHECK(b.facts_text == "p(a).\n");
  CHECK(b.rules_text.empty());
  CHECK(b.queries_text.empty());
}

TEST_CASE("compile_bundle runs the canonical program end to end") {
  LogicContext ctx = compile_bundle(bird_bundle());

  CHECK(ctx.program.retained.size() == 6);
  CHECK(ctx.drop_log.empty());
  CHECK(ctx.fix_log.empty());
  CHECK_FALSE(ctx.query_fallback);
  REQUIRE(ctx.answers.size() == 1);
  REQUIRE(ctx.answers[0].bindings.size() == 1);
  CHECK(ctx.answers[0].bindings[0].at("X").text == "tweety");
}

TEST_CASE("compile_bundle corrects sloppy syntax before compiling") {
  SynthesisBundle b;
  b.facts_text = "married-to(alice, bob)\n";  // hyphen + missing period
  b.rules_text = "spouse(?X, ?Y) :- married_to(?X, ?Y)\n";
  b.queries_text = "?- spouse(alice, ?Y).\n";
  LogicContext ctx = compile_bundle(b);

  CHECK_FALSE(ctx.fix_log.empty());
  REQUIRE(ctx.answers.size() == 1);
  CHECK(ctx.answers[0].bindings[0].at("Y").text == "bob");
}

TEST_CASE("all queries failing to compile sets the fallback") {
  SynthesisBundle b = bird_bundle();
  b.queries_text = "?- \\naf eats_worms(?X).\n";  // unsafe: ?X only under naf
  LogicContext ctx = compile_bundle(b);

  CHECK(ctx.query_fallback);
  CHECK(ctx.answers.empty());
  CHECK(ctx.program.retained.size() == 6);  // program retained regardless
  REQUIRE(ctx.drop_log.size() == 1);
  CHECK(ctx.drop_log[0].reason.find("unsafe") != std::string::npos);
}

TEST_CASE("an empty queries section also counts as fallback") {
  SynthesisBundle b = bird_bundle();
  b.queries_text = "";
  LogicContext ctx = compile_bundle(b);
  CHECK(ctx.query_fallback);
  CHECK(ctx.answers.empty());
}

TEST_CASE("per-query compilation is independent") {
  SynthesisBundle b = bird_bundle();
  b.queries_text = "?- eats_worms(?X, ?Y).\n?- eats_worms(?X).\n";  // first has bad arity
  LogicContext ctx = compile_bundle(b);

  CHECK_FALSE(ctx.query_fallback);
  REQUIRE(ctx.answers.size() == 1);
  CHECK(ctx.answers[0].bindings[0].at("X").text == "tweety");
  REQUIRE(ctx.drop_log.size() == 1);
  CHECK(ctx.drop_log[0].reason.find("arity") != std::string::npos);
}

TEST_CASE("an arity-conflicting fact is dropped while answers still flow") {
  SynthesisBundle b;
  b.facts_text = "p(a).\np(a, b).\n";
  b.queries_text = "?- p(?X).\n";
  LogicContext ctx = compile_bundle(b);

  REQUIRE(ctx.drop_log.size() == 1);
  CHECK(ctx.drop_log[0].reason.find("arity conflict") != std::string::npos);
  REQUIRE(ctx.answers.size() == 1);
  CHECK(ctx.answers[0].bindings.size() == 1);
}

TEST_CASE("grounding blowup at answer time is logged per query, no fallback") {
  SynthesisBundle b;
  std::string facts;
  for (int i = 0; i < 10; ++i) facts += "f(c" + std::to_string(i) + ").\n";
  b.facts_text = facts;
  b.rules_text = "g(?X, ?Y, ?Z) :- f(?X), f(?Y), f(?Z).\n";
  b.queries_text = "?- g(a1, a2, a3).\n";

  logic::EngineConfig cfg;
  cfg.ground_cap = 2000;  // 13 constants ^ 3 body vars = 2197 instantiations
  LogicContext ctx = compile_bundle(b, cfg);

  CHECK_FALSE(ctx.query_fallback);
  CHECK(ctx.answers.empty());
  REQUIRE(ctx.drop_log.size() == 1);
  CHECK(ctx.drop_log[0].reason.find("query answering failed") != std::string::npos);
  CHECK(ctx.drop_log[0].reason.find("grounding budget") != std::string::npos);
}

TEST_CASE("retained program text re-compiles to the same statements") {
  LogicContext ctx = compile_bundle(bird_bundle());
  std::string text = retained_text(ctx.program);
  logic::Engine engine;
  logic::CompiledProgram again = engine.compile_text(text);
  REQUIRE(again.retained.size() == ctx.program.retained.size());
  for (size_t i = 0; i < again.retained.size(); ++i)
    CHECK(logic::to_text(again.retained[i]) == logic::to_text(ctx.program.retained[i]));
}

TEST_CASE("nothing in the compiled program was invented downstream") {
  SynthesisBundle b = bird_bundle();
  b.facts_text += "junk junk junk\n";  // corrected away or dropped
  LogicContext ctx = compile_bundle(b);

  logic::LogicProgram parsed = logic::parse_program(ctx.corrected_text);
  std::set<std::string> source;
  for (const auto& s : parsed.statements) source.insert(logic::to_text(s));
  for (const auto& s : ctx.program.retained) CHECK(source.count(logic::to_text(s)) == 1);
}

TEST_CASE("answer rendering covers bindings, yes and no") {
  SynthesisBundle b = bird_bundle();
  b.queries_text = "?- eats_worms(?X).\n?- eats_worms(tweety).\n?- eats_worms(opus).\n";
  LogicContext ctx = compile_bundle(b);

  REQUIRE(ctx.answers.size() == 3);
  CHECK(answer_set_text(ctx.answers[0]) == "?- eats_worms(?X).  ->  ?X = tweety");
  CHECK(answer_set_text(ctx.answers[1]) == "?- eats_worms(tweety).  ->  yes");
  CHECK(answer_set_text(ctx.answers[2]) == "?- eats_worms(opus).  ->  no");
  std::string all = answers_text(ctx.answers);
  CHECK(std::count(all.begin(), all.end(), '\n') == 3);
}

TEST_CASE("clog serialization is deterministic and carries the fallback flag") {
  SynthesisBundle b = bird_bundle();
  LogicContext ctx = compile_bundle(b);
  json j1 = to_json(ctx);
  json j2 = to_json(compile_bundle(b));
  CHECK(j1.dump() == j2.dump());
  CHECK(j1["query_fallback"] == false);
  CHECK(j1["program"].size() == 6);
  CHECK(j1["answers"][0]["bindings"][0]["?X"] == "tweety");
}

TEST_CASE("build_logic_context chains the LLM call into the engine") {
  Rig rig({kBirdCompletion});
  LogicContext ctx = build_logic_context(tiny_context(), *rig.gw);
  CHECK_FALSE(ctx.query_fallback);
  REQUIRE(ctx.answers.size() == 1);
  CHECK(ctx.answers[0].bindings[0].at("X").text == "tweety");
}
