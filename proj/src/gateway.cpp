#include "logt/gateway.hpp"

#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <semaphore>
#include <sstream>
#include <thread>

#include "logt/core.hpp"

#include <httplib.h>
#include <openssl/evp.h>

namespace logt {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  EVP_DigestUpdate(ctx, data.data(), data.size());
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hexd = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hexd[digest[i] >> 4]);
    out.push_back(hexd[digest[i] & 0xf]);
  }
  return out;
}

std::string DecodeParams::fingerprint() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "t=%.3f;seed=%d;max=%d", temperature, seed, max_tokens);
  return buf;
}

DecodeParams preset_params(Preset p) {
  switch (p) {
    case Preset::Prediction: return {0.0, 42, 4096};
    case Preset::Reasoning: return {0.2, 42, 4096};
  }
  return {0.0, 42, 4096};
}

static std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read file: " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

static void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write file: " + p.string());
  out << content;
}

// --- TemplateStore ---

static std::set<std::string> scan_placeholders(const std::string& body) {
  static const std::regex re(R"(\{\{([A-Za-z_][A-Za-z0-9_]*)\}\})");
  std::set<std::string> vars;
  for (auto it = std::sregex_iterator(body.begin(), body.end(), re);
       it != std::sregex_iterator(); ++it) {
    vars.insert((*it)[1].str());
  }
  return vars;
}

TemplateStore::TemplateStore(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error("template directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& p : files) add(p.stem().string(), read_file(p));
}

void TemplateStore::add(const std::string& id, const std::string& body) {
  entries_[id] = Entry{body, scan_placeholders(body)};
}

bool TemplateStore::has(const std::string& id) const { return entries_.count(id) > 0; }

const std::set<std::string>& TemplateStore::required_vars(const std::string& id) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) throw UnknownTemplate(id);
  return it->second.vars;
}

const std::string& TemplateStore::body(const std::string& id) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) throw UnknownTemplate(id);
  return it->second.body;
}

std::vector<std::string> TemplateStore::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : entries_) out.push_back(id);
  return out;
}

std::string TemplateStore::render(const std::string& id,
                                  const std::map<std::string, std::string>& vars) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) throw UnknownTemplate(id);
  const Entry& e = it->second;
  for (const auto& v : e.vars) {
    if (!vars.count(v)) throw MissingVariable(v);
  }
  for (const auto& [k, _] : vars) {
    if (!e.vars.count(k)) throw FormatError("unused template variable '" + k + "' for '" + id + "'");
  }
  std::string out;
  out.reserve(e.body.size());
  size_t pos = 0;
  while (pos < e.body.size()) {
    size_t open = e.body.find("{{", pos);
    if (open == std::string::npos) {
      out.append(e.body, pos, std::string::npos);
      break;
    }
    size_t close = e.body.find("}}", open);
    std::string name =
        close == std::string::npos ? "" : e.body.substr(open + 2, close - open - 2);
    auto vit = vars.find(name);
    if (vit == vars.end()) {
      // Not a scanned placeholder (malformed or odd chars): copy through.
      out.append(e.body, pos, open + 2 - pos);
      pos = open + 2;
      continue;
    }
    out.append(e.body, pos, open - pos);
    out.append(vit->second);
    pos = close + 2;
  }
  return out;
}

// --- MockProvider ---

MockProvider::MockProvider(const fs::path& dir) : dir_(dir) {
  fs::path manifest = dir_ / "manifest.json";
  if (fs::exists(manifest)) {
    json m = json::parse(read_file(manifest), nullptr, false);
    if (m.is_discarded() || !m.is_object())
      throw Error("mock provider: unparsable manifest " + manifest.string());
    for (const auto& [digest, file] : m.items()) {
      if (file.is_string()) manifest_[digest] = file.get<std::string>();
    }
  }
}

std::string MockProvider::complete(const ProviderRequest& req) {
  std::string digest = sha256_hex(req.prompt);
  std::lock_guard<std::mutex> lock(mu_);
  auto it = manifest_.find(digest);
  if (it == manifest_.end()) {
    fs::create_directories(dir_ / "misses");
    write_file(dir_ / "misses" / (digest + ".prompt.txt"), req.prompt);
    throw ProviderError("mock provider: no canned response for prompt digest " + digest);
  }
  fs::path resp = dir_ / it->second;
  if (!fs::exists(resp))
    throw ProviderError("mock provider: response file missing: " + resp.string());
  return read_file(resp);
}

// --- HttpProvider ---

std::string HttpProvider::complete(const ProviderRequest& req) {
  size_t scheme = req.endpoint.find("://");
  if (scheme == std::string::npos)
    throw ProviderError("http provider: endpoint must include a scheme");
  size_t path_at = req.endpoint.find('/', scheme + 3);
  std::string base = path_at == std::string::npos ? req.endpoint : req.endpoint.substr(0, path_at);
  std::string path = path_at == std::string::npos ? "/" : req.endpoint.substr(path_at);

  httplib::Client cli(base);
  cli.set_connection_timeout(15, 0);
  cli.set_read_timeout(120, 0);
  httplib::Headers headers;
  if (!req.api_key.empty()) headers.emplace("Authorization", "Bearer " + req.api_key);

  json body = {{"model", req.model_id},
               {"prompt", req.prompt},
               {"temperature", req.decode.temperature},
               {"seed", req.decode.seed},
               {"max_tokens", req.decode.max_tokens}};
  auto res = cli.Post(path, headers, body.dump(), "application/json");
  if (!res) throw ProviderError("http provider: no response from endpoint");
  if (res->status != 200)
    throw ProviderError("http provider: status " + std::to_string(res->status));
  json r = json::parse(res->body, nullptr, false);
  if (r.is_discarded()) throw ProviderError("http provider: unparsable response body");
  if (r.contains("completion") && r["completion"].is_string())
    return r["completion"].get<std::string>();
  if (r.contains("choices") && r["choices"].is_array() && !r["choices"].empty()) {
    const json& c = r["choices"][0];
    if (c.contains("text") && c["text"].is_string()) return c["text"].get<std::string>();
    if (c.contains("message") && c["message"].is_object() &&
        c["message"].contains("content") && c["message"]["content"].is_string())
      return c["message"]["content"].get<std::string>();
  }
  throw ProviderError("http provider: response has no completion field");
}

// --- structured-output schemas ---

static bool str_field(const json& v, const char* key) {
  return v.is_object() && v.contains(key) && v[key].is_string();
}

static std::string check_symbolic_context(const json& v) {
  if (!v.is_object()) return "not an object";
  if (!v.contains("ontology") || !v["ontology"].is_object()) return "missing object 'ontology'";
  const json& ont = v["ontology"];
  if (!ont.contains("nodes") || !ont["nodes"].is_array()) return "ontology: missing array 'nodes'";
  if (!ont.contains("edges") || !ont["edges"].is_array()) return "ontology: missing array 'edges'";
  static const std::set<std::string> kinds = {"concept", "rule", "condition", "exception"};
  static const std::set<std::string> relations = {"has_condition", "has_conclusion",
                                                  "has_exception", "overrides",
                                                  "subclass_of",   "relates_to"};
  for (const json& n : ont["nodes"]) {
    if (!str_field(n, "id") || !str_field(n, "kind") || !str_field(n, "label"))
      return "ontology node needs string id/kind/label";
    if (!kinds.count(n["kind"].get<std::string>()))
      return "ontology node kind '" + n["kind"].get<std::string>() + "' not recognized";
  }
  for (const json& e : ont["edges"]) {
    if (!str_field(e, "from") || !str_field(e, "relation") || !str_field(e, "to"))
      return "ontology edge needs string from/relation/to";
    if (!relations.count(e["relation"].get<std::string>()))
      return "ontology edge relation '" + e["relation"].get<std::string>() + "' not recognized";
  }
  if (!v.contains("triples") || !v["triples"].is_array()) return "missing array 'triples'";
  for (const json& t : v["triples"]) {
    if (!str_field(t, "subject") || !str_field(t, "predicate") || !str_field(t, "object"))
      return "triple needs string subject/predicate/object";
    if (t.contains("ontology_ref") && !t["ontology_ref"].is_string())
      return "triple ontology_ref must be a string";
  }
  if (!v.contains("nl_queries") || !v["nl_queries"].is_array())
    return "missing array 'nl_queries'";
  for (const json& q : v["nl_queries"])
    if (!q.is_string()) return "nl_queries entries must be strings";
  return "";
}

static std::string check_trace_steps(const json& v) {
  if (!v.is_object() || !v.contains("steps") || !v["steps"].is_array())
    return "missing array 'steps'";
  for (const json& s : v["steps"]) {
    if (!str_field(s, "type") || !str_field(s, "text"))
      return "step needs string type/text";
  }
  return "";
}

static std::string check_label_only(const json& v) {
  if (!str_field(v, "label")) return "missing string field 'label'";
  if (!try_parse_label(v["label"].get<std::string>()))
    return "unrecognized label '" + v["label"].get<std::string>() + "'";
  return "";
}

static std::string check_augmented_hypothesis(const json& v) {
  if (!str_field(v, "text")) return "missing string field 'text'";
  if (v["text"].get<std::string>().empty()) return "field 'text' is empty";
  return "";
}

bool schema_registered(const std::string& schema_id) {
  return schema_id == "symbolic_context" || schema_id == "trace_steps" ||
         schema_id == "label_only" || schema_id == "augmented_hypothesis";
}

std::string check_schema(const std::string& schema_id, const json& value) {
  if (schema_id == "symbolic_context") return check_symbolic_context(value);
  if (schema_id == "trace_steps") return check_trace_steps(value);
  if (schema_id == "label_only") return check_label_only(value);
  if (schema_id == "augmented_hypothesis") return check_augmented_hypothesis(value);
  return "unknown schema '" + schema_id + "'";
}

// --- candidate block scan ---

// Balanced {...} or [...] starting at `pos`, honoring JSON string quoting.
// Returns npos when unbalanced.
static size_t balanced_end(const std::string& s, size_t pos) {
  int depth = 0;
  bool in_string = false;
  for (size_t i = pos; i < s.size(); ++i) {
    char c = s[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{' || c == '[') ++depth;
    else if (c == '}' || c == ']') {
      --depth;
      if (depth == 0) return i;
      if (depth < 0) return std::string::npos;
    }
  }
  return std::string::npos;
}

std::vector<std::string> candidate_blocks(const std::string& completion) {
  std::vector<std::pair<size_t, std::string>> found;
  std::vector<std::pair<size_t, size_t>> fenced_spans;

  size_t pos = 0;
  while ((pos = completion.find("```", pos)) != std::string::npos) {
    size_t content = completion.find('\n', pos + 3);
    if (content == std::string::npos) break;
    ++content;
    size_t close = completion.find("```", content);
    if (close == std::string::npos) break;
    found.emplace_back(pos, completion.substr(content, close - content));
    fenced_spans.emplace_back(pos, close + 3);
    pos = close + 3;
  }

  auto inside_fence = [&](size_t i) {
    for (const auto& [a, b] : fenced_spans)
      if (i >= a && i < b) return true;
    return false;
  };
  for (size_t i = 0; i < completion.size(); ++i) {
    char c = completion[i];
    if ((c == '{' || c == '[') && !inside_fence(i)) {
      size_t end = balanced_end(completion, i);
      if (end != std::string::npos) {
        found.emplace_back(i, completion.substr(i, end - i + 1));
        i = end;
      }
    }
  }

  std::stable_sort(found.begin(), found.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::string> out;
  for (auto& [_, text] : found) out.push_back(std::move(text));
  return out;
}

// --- Gateway ---

class Permits {
 public:
  explicit Permits(int n) : sem_(n > 0 ? n : 1) {}
  void acquire() { sem_.acquire(); }
  void release() { sem_.release(); }

 private:
  std::counting_semaphore<4096> sem_;
};

Gateway::Gateway(GatewayConfig cfg, std::shared_ptr<Provider> provider,
                 std::shared_ptr<const TemplateStore> templates)
    : cfg_(std::move(cfg)),
      provider_(std::move(provider)),
      templates_(std::move(templates)),
      permits_(std::make_unique<Permits>(cfg_.permits)) {}

Gateway::~Gateway() = default;

std::string Gateway::render(const std::string& template_id,
                            const std::map<std::string, std::string>& vars) const {
  if (!templates_) throw UnknownTemplate(template_id);
  return templates_->render(template_id, vars);
}

std::string Gateway::cache_key(const std::string& prompt, const DecodeParams& decode) const {
  return sha256_hex(cfg_.model.model_id + "\n" + decode.fingerprint() + "\n" + prompt);
}

bool Gateway::cache_load(const std::string& key, std::string& out) const {
  if (cfg_.cache_dir.empty()) return false;
  fs::path p = cfg_.cache_dir / (key + ".json");
  if (!fs::exists(p)) return false;
  json entry = json::parse(read_file(p), nullptr, false);
  if (entry.is_discarded() || !str_field(entry, "completion") ||
      !str_field(entry, "completion_sha256"))
    throw CacheCorruption("cache entry " + key + ": unreadable");
  std::string completion = entry["completion"].get<std::string>();
  if (sha256_hex(completion) != entry["completion_sha256"].get<std::string>())
    throw CacheCorruption("cache entry " + key + ": checksum mismatch");
  out = std::move(completion);
  return true;
}

void Gateway::cache_store(const std::string& key, const DecodeParams& decode,
                          const std::string& prompt, const std::string& completion) const {
  if (cfg_.cache_dir.empty()) return;
  fs::create_directories(cfg_.cache_dir);
  json entry = {{"model_id", cfg_.model.model_id},
                {"decode",
                 {{"temperature", decode.temperature},
                  {"seed", decode.seed},
                  {"max_tokens", decode.max_tokens}}},
                {"prompt_sha256", sha256_hex(prompt)},
                {"completion", completion},
                {"completion_sha256", sha256_hex(completion)}};
  static std::atomic<long> seq{0};
  fs::path tmp = cfg_.cache_dir / (key + ".tmp." + std::to_string(::getpid()) + "." +
                                   std::to_string(seq.fetch_add(1)));
  write_file(tmp, entry.dump(2) + "\n");
  fs::rename(tmp, cfg_.cache_dir / (key + ".json"));
}

std::string Gateway::call_provider(const std::string& prompt, const DecodeParams& decode) {
  ProviderRequest req;
  req.model_id = cfg_.model.model_id;
  req.endpoint = cfg_.model.endpoint;
  if (!cfg_.model.api_key_env.empty()) {
    const char* key = std::getenv(cfg_.model.api_key_env.c_str());
    if (key) req.api_key = key;
  }
  req.decode = decode;
  req.prompt = prompt;

  permits_->acquire();
  struct Release {
    Permits* p;
    ~Release() { p->release(); }
  } release{permits_.get()};

  std::string last_error;
  for (int attempt = 0; attempt < std::max(1, cfg_.max_attempts); ++attempt) {
    if (attempt > 0 && cfg_.backoff_base_ms > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(cfg_.backoff_base_ms * (1L << (attempt - 1))));
    }
    try {
      std::string completion = provider_->complete(req);
      std::lock_guard<std::mutex> lock(stats_mu_);
      ++stats_.provider_calls;
      return completion;
    } catch (const ProviderError& e) {
      last_error = e.what();
    }
  }
  throw ProviderError(last_error + " (after " + std::to_string(std::max(1, cfg_.max_attempts)) +
                      " attempts)");
}

std::string Gateway::complete(const std::string& prompt, Preset preset) {
  DecodeParams decode = preset_params(preset);
  std::string key = cache_key(prompt, decode);
  std::string cached;
  if (cache_load(key, cached)) {
    std::lock_guard<std::mutex> lock(stats_mu_);
    ++stats_.cache_hits;
    return cached;
  }
  std::string completion = call_provider(prompt, decode);
  cache_store(key, decode, prompt, completion);
  return completion;
}

std::string Gateway::complete_template(const std::string& template_id,
                                       const std::map<std::string, std::string>& vars,
                                       Preset preset) {
  return complete(render(template_id, vars), preset);
}

nlohmann::json Gateway::extract_structured(const std::string& completion,
                                           const std::string& schema_id) {
  if (!schema_registered(schema_id)) throw FormatError("unknown schema '" + schema_id + "'");

  auto attempt = [&](const std::string& text, std::string& diag) -> std::unique_ptr<json> {
    bool parsed_any = false;
    for (const std::string& cand : candidate_blocks(text)) {
      json v = json::parse(cand, nullptr, false);
      if (v.is_discarded()) continue;
      std::string err = check_schema(schema_id, v);
      if (err.empty()) return std::make_unique<json>(std::move(v));
      if (!parsed_any) {
        diag = err;
        parsed_any = true;
      }
    }
    if (!parsed_any) diag = "no parsable JSON block";
    return nullptr;
  };

  std::string diag;
  if (auto v = attempt(completion, diag)) return *v;

  if (templates_ && templates_->has("repair")) {
    try {
      std::string prompt = templates_->render(
          "repair",
          {{"schema_id", schema_id}, {"diagnostics", diag}, {"previous", completion}});
      std::string repaired = complete(prompt, Preset::Prediction);
      {
        std::lock_guard<std::mutex> lock(stats_mu_);
        ++stats_.repairs;
      }
      std::string diag2;
      if (auto v = attempt(repaired, diag2)) return *v;
      diag += "; after repair: " + diag2;
    } catch (const ProviderError& e) {
      diag += std::string("; repair call failed: ") + e.what();
    }
  }
  throw ExtractionFailed("schema '" + schema_id + "': " + diag);
}

GatewayStats Gateway::stats() const {
  std::lock_guard<std::mutex> lock(stats_mu_);
  return stats_;
}

}  // namespace logt
