#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <memory>

#include "logt/gateway.hpp"
#include "support/providers.hpp"
#include "support/tmpdir.hpp"

using namespace logt;
using testsupport::FailingProvider;
using testsupport::ScriptedProvider;
using testsupport::TempDir;
using testsupport::put_file;
using testsupport::slurp;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::shared_ptr<TemplateStore> store_with_repair() {
  auto store = std::make_shared<TemplateStore>();
  store->add("repair",
             "Schema: {{schema_id}}\nProblem: {{diagnostics}}\nWas:\n{{previous}}\n");
  return store;
}

GatewayConfig fast_config(const fs::path& cache_dir) {
  GatewayConfig cfg;
  cfg.model.model_id = "test-model";
  cfg.cache_dir = cache_dir;
  cfg.backoff_base_ms = 0;
  return cfg;
}

}  // namespace

TEST_CASE("sha256_hex matches known vectors") {
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("decode presets carry the pinned values") {
  DecodeParams pred = preset_params(Preset::Prediction);
  CHECK(pred.temperature == 0.0);
  CHECK(pred.seed == 42);
  CHECK(pred.max_tokens == 4096);
  DecodeParams reas = preset_params(Preset::Reasoning);
  CHECK(reas.temperature == 0.2);
  CHECK(reas.seed == 42);
  CHECK(reas.max_tokens == 4096);
  CHECK(pred.fingerprint() != reas.fingerprint());
}

TEST_CASE("template store loads a directory and renders") {
  TempDir dir("tpl");
  put_file(dir / "greet.txt", "Hello {{name}}, welcome to {{place}}.");
  put_file(dir / "plain.txt", "no placeholders here");
  put_file(dir / "ignored.md", "not a template");
  TemplateStore store(dir.path());

  CHECK(store.has("greet"));
  CHECK(store.has("plain"));
  CHECK_FALSE(store.has("ignored"));
  CHECK(store.required_vars("greet") == std::set<std::string>{"name", "place"});

  std::string out = store.render("greet", {{"name", "Ada"}, {"place", "the lab"}});
  CHECK(out == "Hello Ada, welcome to the lab.");
  CHECK(store.render("plain", {}) == "no placeholders here");
  // Deterministic: same inputs, same bytes.
  CHECK(store.render("greet", {{"name", "Ada"}, {"place", "the lab"}}) == out);
}

TEST_CASE("template render errors") {
  TemplateStore store;
  store.add("t", "a {{x}} b");
  CHECK_THROWS_AS(store.render("nope", {}), UnknownTemplate);
  try {
    store.render("t", {});
    FAIL("expected MissingVariable");
  } catch (const MissingVariable& e) {
    CHECK(e.name == "x");
  }
  CHECK_THROWS_AS(store.render("t", {{"x", "1"}, {"y", "2"}}), FormatError);
}

TEST_CASE("repeated placeholder substitutes everywhere") {
  TemplateStore store;
  store.add("t", "{{w}} and {{w}} again");
  CHECK(store.render("t", {{"w", "here"}}) == "here and here again");
}

TEST_CASE("shipped templates directory loads and contains repair") {
  TemplateStore store(fs::path(LOGT_REPO_DIR) / "templates");
  CHECK(store.has("repair"));
  auto vars = store.required_vars("repair");
  CHECK(vars == std::set<std::string>{"diagnostics", "previous", "schema_id"});
}

TEST_CASE("mock provider serves the manifest and dumps misses") {
  TempDir dir("mock");
  std::string prompt = "what is the answer?";
  std::string digest = sha256_hex(prompt);
  put_file(dir / "manifest.json", json{{digest, "r1.txt"}}.dump());
  put_file(dir / "r1.txt", "the answer is 42");

  MockProvider mock(dir.path());
  ProviderRequest req;
  req.prompt = prompt;
  CHECK(mock.complete(req) == "the answer is 42");

  req.prompt = "never seen";
  CHECK_THROWS_AS(mock.complete(req), ProviderError);
  fs::path miss = dir / "misses" / (sha256_hex("never seen") + ".prompt.txt");
  REQUIRE(fs::exists(miss));
  CHECK(slurp(miss) == "never seen");
}

TEST_CASE("gateway caches completions and replays them without the provider") {
  TempDir cache("cache");
  auto provider = std::make_shared<ScriptedProvider>("canned reply");
  Gateway gw(fast_config(cache.path()), provider, nullptr);

  std::string first = gw.complete("hello", Preset::Prediction);
  CHECK(first == "canned reply");
  CHECK(provider->calls == 1);

  std::string second = gw.complete("hello", Preset::Prediction);
  CHECK(second == first);
  CHECK(provider->calls == 1);
  CHECK(gw.stats().cache_hits == 1);
  CHECK(gw.stats().provider_calls == 1);

  // Different preset means different decode params, hence a fresh call.
  gw.complete("hello", Preset::Reasoning);
  CHECK(provider->calls == 2);
}

TEST_CASE("cache entries never mention endpoint or api key names") {
  TempDir cache("cache");
  GatewayConfig cfg = fast_config(cache.path());
  cfg.model.endpoint = "http://example.invalid/v1";
  cfg.model.api_key_env = "SECRET_KEY_ENV";
  Gateway gw(cfg, std::make_shared<ScriptedProvider>("ok"), nullptr);
  gw.complete("p", Preset::Prediction);

  int entries = 0;
  for (const auto& e : fs::directory_iterator(cache.path())) {
    std::string content = slurp(e.path());
    CHECK(content.find("SECRET_KEY_ENV") == std::string::npos);
    CHECK(content.find("example.invalid") == std::string::npos);
    ++entries;
  }
  CHECK(entries == 1);
}

TEST_CASE("a second gateway instance reuses the on-disk cache") {
  TempDir cache("cache");
  {
    Gateway gw(fast_config(cache.path()), std::make_shared<ScriptedProvider>("persisted"),
               nullptr);
    gw.complete("p", Preset::Prediction);
  }
  auto provider = std::make_shared<ScriptedProvider>("should not be called");
  Gateway gw2(fast_config(cache.path()), provider, nullptr);
  CHECK(gw2.complete("p", Preset::Prediction) == "persisted");
  CHECK(provider->calls == 0);
}

TEST_CASE("provider failures are retried then surface as ProviderError") {
  TempDir cache("cache");
  auto provider = std::make_shared<FailingProvider>();
  GatewayConfig cfg = fast_config(cache.path());
  cfg.max_attempts = 3;
  Gateway gw(cfg, provider, nullptr);
  CHECK_THROWS_AS(gw.complete("p", Preset::Prediction), ProviderError);
  CHECK(provider->calls == 3);
}

TEST_CASE("tampered cache entry raises CacheCorruption") {
  TempDir cache("cache");
  Gateway gw(fast_config(cache.path()), std::make_shared<ScriptedProvider>("original"),
             nullptr);
  gw.complete("p", Preset::Prediction);

  fs::path entry;
  for (const auto& e : fs::directory_iterator(cache.path())) entry = e.path();
  json j = json::parse(slurp(entry));
  j["completion"] = "tampered";
  put_file(entry, j.dump());

  CHECK_THROWS_AS(gw.complete("p", Preset::Prediction), CacheCorruption);
}

TEST_CASE("candidate_blocks finds fenced and bare JSON in order") {
  std::string text =
      "Sure, here you go:\n```json\n{\"a\": 1}\n```\nand also {\"b\": [2, 3]} trailing.";
  auto blocks = candidate_blocks(text);
  REQUIRE(blocks.size() == 2);
  CHECK(json::parse(blocks[0]) == json{{"a", 1}});
  CHECK(json::parse(blocks[1]) == json{{"b", {2, 3}}});
}

TEST_CASE("candidate_blocks ignores braces inside strings") {
  std::string text = R"(prefix {"msg": "curly } inside", "n": 1} suffix)";
  auto blocks = candidate_blocks(text);
  REQUIRE(blocks.size() == 1);
  CHECK(json::parse(blocks[0])["n"] == 1);
}

TEST_CASE("extract_structured takes the first conforming block, prose ignored") {
  TempDir cache("cache");
  Gateway gw(fast_config(cache.path()), std::make_shared<ScriptedProvider>("unused"),
             store_with_repair());
  json v = gw.extract_structured(
      "Reasoning about it...\n{\"label\": \"entailment\"}\nHope that helps!", "label_only");
  CHECK(v["label"] == "entailment");
  CHECK(gw.stats().repairs == 0);
}

TEST_CASE("extract_structured skips nonconforming blocks for a later valid one") {
  TempDir cache("cache");
  Gateway gw(fast_config(cache.path()), std::make_shared<ScriptedProvider>("unused"),
             store_with_repair());
  json v = gw.extract_structured(
      "{\"note\": \"warmup\"} then the real one {\"label\": \"contradiction\"}", "label_only");
  CHECK(v["label"] == "contradiction");
}

TEST_CASE("repair re-prompt fixes a malformed completion once") {
  TempDir cache("cache");
  auto provider = std::make_shared<ScriptedProvider>("fixed: {\"label\": \"neutral\"}");
  Gateway gw(fast_config(cache.path()), provider, store_with_repair());
  json v = gw.extract_structured("no JSON here at all", "label_only");
  CHECK(v["label"] == "neutral");
  CHECK(gw.stats().repairs == 1);
  CHECK(provider->calls == 1);
}

TEST_CASE("extraction fails after an unhelpful repair") {
  TempDir cache("cache");
  auto provider = std::make_shared<ScriptedProvider>("still nothing useful");
  Gateway gw(fast_config(cache.path()), provider, store_with_repair());
  CHECK_THROWS_AS(gw.extract_structured("garbage", "label_only"), ExtractionFailed);
  CHECK(gw.stats().repairs == 1);
}

TEST_CASE("extraction fails cleanly when the repair call itself cannot complete") {
  TempDir cache("cache");
  GatewayConfig cfg = fast_config(cache.path());
  cfg.max_attempts = 1;
  Gateway gw(cfg, std::make_shared<FailingProvider>(), store_with_repair());
  CHECK_THROWS_AS(gw.extract_structured("garbage", "label_only"), ExtractionFailed);
}

TEST_CASE("unknown schema id is rejected up front") {
  TempDir cache("cache");
  Gateway gw(fast_config(cache.path()), std::make_shared<ScriptedProvider>("x"), nullptr);
  CHECK_THROWS_AS(gw.extract_structured("{}", "no_such_schema"), FormatError);
}

TEST_CASE("label_only schema validates the label value") {
  CHECK(check_schema("label_only", json{{"label", "contradiction"}}).empty());
  CHECK_FALSE(check_schema("label_only", json{{"label", "perhaps"}}).empty());
  CHECK_FALSE(check_schema("label_only", json{{"verdict", "entailment"}}).empty());
}

TEST_CASE("symbolic_context schema shape checks") {
  json good = {{"ontology",
                {{"nodes", json::array({{{"id", "n1"}, {"kind", "rule"}, {"label", "r"}}})},
                 {"edges", json::array({{{"from", "n1"},
                                         {"relation", "has_condition"},
                                         {"to", "n1"}}})}}},
               {"triples", json::array({{{"subject", "s"},
                                         {"predicate", "p"},
                                         {"object", "o"}}})},
               {"nl_queries", json::array({"is it so?"})}};
  CHECK(check_schema("symbolic_context", good).empty());

  json bad_kind = good;
  bad_kind["ontology"]["nodes"][0]["kind"] = "banana";
  CHECK_FALSE(check_schema("symbolic_context", bad_kind).empty());

  json bad_rel = good;
  bad_rel["ontology"]["edges"][0]["relation"] = "near";
  CHECK_FALSE(check_schema("symbolic_context", bad_rel).empty());

  json no_queries = good;
  no_queries.erase("nl_queries");
  CHECK_FALSE(check_schema("symbolic_context", no_queries).empty());
}

TEST_CASE("trace_steps schema accepts unknown step types (mapped later)") {
  json v = {{"steps", json::array({{{"type", "wild_guess"}, {"text", "hmm"}}})}};
  CHECK(check_schema("trace_steps", v).empty());
  json bad = {{"steps", json::array({{{"type", 3}, {"text", "hmm"}}})}};
  CHECK_FALSE(check_schema("trace_steps", bad).empty());
}

TEST_CASE("augmented_hypothesis schema needs nonempty text") {
  CHECK(check_schema("augmented_hypothesis", json{{"text", "Bob shall not disclose."}}).empty());
  CHECK_FALSE(check_schema("augmented_hypothesis", json{{"text", ""}}).empty());
  CHECK_FALSE(check_schema("augmented_hypothesis", json::object()).empty());
}

TEST_CASE("extract_structured result is byte-stable for identical completions") {
  TempDir cache("cache");
  Gateway gw(fast_config(cache.path()), std::make_shared<ScriptedProvider>("x"),
             store_with_repair());
  std::string completion = "{\"label\": \"entailment\"}";
  json a = gw.extract_structured(completion, "label_only");
  json b = gw.extract_structured(completion, "label_only");
  CHECK(a.dump() == b.dump());
}
