#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "logt/errors.hpp"

#include <nlohmann/json.hpp>

namespace logt {

std::string sha256_hex(std::string_view data);

enum class Preset { Prediction, Reasoning };

struct DecodeParams {
  double temperature = 0.0;
  int seed = 42;
  int max_tokens = 4096;

  // Stable string form used in cache keys. Temperature printed with three
  // decimals so the key never depends on double formatting quirks.
  std::string fingerprint() const;
};

DecodeParams preset_params(Preset p);

struct ModelConfig {
  std::string model_id = "mock-model";
  std::string endpoint;     // unused by the mock provider
  std::string api_key_env;  // name of the env var holding the key, never the key itself
};

// Prompt templates are plain UTF-8 files under a directory, one per id
// (id = filename stem). Placeholders are written {{name}}.
class TemplateStore {
 public:
  TemplateStore() = default;
  explicit TemplateStore(const std::filesystem::path& dir);

  void add(const std::string& id, const std::string& body);
  bool has(const std::string& id) const;
  const std::set<std::string>& required_vars(const std::string& id) const;
  const std::string& body(const std::string& id) const;
  std::vector<std::string> ids() const;

  // Substitutes every placeholder. Vars must match required_vars exactly:
  // a missing one raises MissingVariable, an unused one raises FormatError.
  std::string render(const std::string& id,
                     const std::map<std::string, std::string>& vars) const;

 private:
  struct Entry {
    std::string body;
    std::set<std::string> vars;
  };
  std::map<std::string, Entry> entries_;
};

struct ProviderRequest {
  std::string model_id;
  std::string endpoint;
  std::string api_key;  // resolved from the environment just before the call
  DecodeParams decode;
  std::string prompt;
};

class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string complete(const ProviderRequest& req) = 0;
  virtual std::string name() const = 0;
};

// Scripted provider: a directory with manifest.json mapping
// sha256(prompt) hex digests to response file names. Unknown prompts are
// dumped under misses/ so a recording pass can fill them in.
class MockProvider : public Provider {
 public:
  explicit MockProvider(const std::filesystem::path& dir);
  std::string complete(const ProviderRequest& req) override;
  std::string name() const override { return "mock"; }

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::map<std::string, std::string> manifest_;
  mutable std::mutex mu_;
};

// Minimal JSON-over-HTTP provider. Reads the API key from the env var named
// in ModelConfig at call time; the key is never written anywhere.
class HttpProvider : public Provider {
 public:
  std::string complete(const ProviderRequest& req) override;
  std::string name() const override { return "http"; }
};

struct GatewayConfig {
  ModelConfig model;
  std::filesystem::path cache_dir;
  int max_attempts = 3;
  int backoff_base_ms = 250;  // doubled per retry; tests set 0
  int permits = 4;            // concurrent in-flight provider calls
};

struct GatewayStats {
  long provider_calls = 0;
  long cache_hits = 0;
  long repairs = 0;
};

// Structured-output schemas the extractor knows about.
bool schema_registered(const std::string& schema_id);
// Returns an empty string when the value conforms, else a diagnostic.
std::string check_schema(const std::string& schema_id, const nlohmann::json& value);

class Gateway {
 public:
  Gateway(GatewayConfig cfg, std::shared_ptr<Provider> provider,
          std::shared_ptr<const TemplateStore> templates);
  ~Gateway();

  const GatewayConfig& config() const { return cfg_; }
  const TemplateStore& templates() const { return *templates_; }

  std::string render(const std::string& template_id,
                     const std::map<std::string, std::string>& vars) const;

  // Cache-first completion. Key = sha256(model_id, decode params, prompt).
  std::string complete(const std::string& prompt, Preset preset);

  std::string complete_template(const std::string& template_id,
                                const std::map<std::string, std::string>& vars,
                                Preset preset);

  // Finds the first JSON block (fenced or bare) in the completion that both
  // parses and conforms to the schema. If none does, re-prompts once through
  // the "repair" template, then gives up with ExtractionFailed.
  nlohmann::json extract_structured(const std::string& completion,
                                    const std::string& schema_id);

  GatewayStats stats() const;

 private:
  std::string cache_key(const std::string& prompt, const DecodeParams& decode) const;
  bool cache_load(const std::string& key, std::string& out) const;
  void cache_store(const std::string& key, const DecodeParams& decode,
                   const std::string& prompt, const std::string& completion) const;
  std::string call_provider(const std::string& prompt, const DecodeParams& decode);

  GatewayConfig cfg_;
  std::shared_ptr<Provider> provider_;
  std::shared_ptr<const TemplateStore> templates_;
  mutable std::mutex stats_mu_;
  GatewayStats stats_;
  std::unique_ptr<class Permits> permits_;
};

// Scans a completion for candidate JSON blocks: fenced ``` blocks first-class,
// plus bare top-level {...} / [...] regions, in order of appearance.
std::vector<std::string> candidate_blocks(const std::string& completion);

}  // namespace logt
