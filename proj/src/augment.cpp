#include "logt/augment.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <csignal>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "logt/errors.hpp"

namespace logt {

using nlohmann::json;

const std::vector<std::string>& KeywordConfig::for_mode(ReasoningMode mode) const {
  switch (mode) {
    case ReasoningMode::Negation: return negation;
    case ReasoningMode::Implication: return implication;
    case ReasoningMode::Defeasible: return defeasible;
  }
  return defeasible;
}

json to_json(const AugmentationTemplate& t) {
  return json{{"template_id", t.template_id},
              {"mode", to_string(t.mode)},
              {"source_label", to_string(t.source_label)},
              {"target_label", to_string(t.target_label)},
              {"prompt_template_id", t.prompt_template_id}};
}

AugmentationTemplate template_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("registry entry is not an object");
  AugmentationTemplate t;
  try {
    t.template_id = j.at("template_id").get<std::string>();
    t.mode = parse_mode(j.at("mode").get<std::string>());
    t.source_label = parse_label(j.at("source_label").get<std::string>());
    t.target_label = parse_label(j.at("target_label").get<std::string>());
    t.prompt_template_id = j.at("prompt_template_id").get<std::string>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("registry entry: ") + e.what());
  }
  if (t.template_id.empty() || t.prompt_template_id.empty())
    throw FormatError("registry entry with empty id");
  return t;
}

json registry_to_json(const std::vector<AugmentationTemplate>& reg) {
  json arr = json::array();
  for (const auto& t : reg) arr.push_back(to_json(t));
  return json{{"templates", arr}};
}

std::vector<AugmentationTemplate> registry_from_json(const json& j) {
  if (!j.is_object() || !j.contains("templates") || !j["templates"].is_array())
    throw FormatError("registry must be an object with a 'templates' array");
  std::vector<AugmentationTemplate> reg;
  for (const auto& entry : j["templates"]) reg.push_back(template_from_json(entry));
  std::vector<std::string> ids;
  for (const auto& t : reg) ids.push_back(t.template_id);
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
    throw FormatError("registry contains a duplicate template_id");
  if (reg.size() != 11)
    throw FormatError("registry must hold exactly 11 templates, found " +
                      std::to_string(reg.size()));
  return reg;
}

std::vector<AugmentationTemplate> load_registry(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw FormatError("cannot read registry file: " + file.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError("registry file " + file.string() + ": " + e.what());
  }
  return registry_from_json(j);
}

const AugmentationTemplate& find_template(const std::vector<AugmentationTemplate>& reg,
                                          const std::string& template_id) {
  for (const auto& t : reg)
    if (t.template_id == template_id) return t;
  throw UnknownTemplate("unknown augmentation template '" + template_id + "'");
}

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool boundary_match(const std::string& text_lower, const std::string& kw_lower) {
  // Keywords with an apostrophe ("n't") match as substrings; the rest only at
  // word boundaries so "no" cannot fire inside "know".
  bool plain = kw_lower.find('\'') != std::string::npos;
  std::size_t pos = 0;
  while ((pos = text_lower.find(kw_lower, pos)) != std::string::npos) {
    if (plain) return true;
    bool left_ok = pos == 0 || !std::isalnum(static_cast<unsigned char>(text_lower[pos - 1]));
    std::size_t end = pos + kw_lower.size();
    bool right_ok =
        end >= text_lower.size() || !std::isalnum(static_cast<unsigned char>(text_lower[end]));
    if (left_ok && right_ok) return true;
    ++pos;
  }
  return false;
}

}  // namespace

std::pair<bool, std::vector<std::string>> verify_mode_keywords(const std::string& text,
                                                               ReasoningMode mode,
                                                               const KeywordConfig& keywords) {
  std::string text_lower = lower(text);
  std::vector<std::string> matched;
  for (const auto& kw : keywords.for_mode(mode))
    if (boundary_match(text_lower, lower(kw))) matched.push_back(kw);
  return {!matched.empty(), matched};
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string generate_text(Gateway& gw, const std::string& prompt) {
  std::string completion = gw.complete(prompt, Preset::Prediction);
  json j = gw.extract_structured(completion, "augmented_hypothesis");
  return trim(j.at("text").get<std::string>());
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

AugmentedHypothesis augment_instance(const InstanceRecord& instance,
                                     const AugmentationTemplate& tmpl, Gateway& gw,
                                     const KeywordConfig& keywords) {
  if (instance.gold_label != tmpl.source_label)
    throw SourceLabelMismatch("template '" + tmpl.template_id + "' expects a " +
                              to_string(tmpl.source_label) + " instance, got " +
                              to_string(instance.gold_label) + " (" + instance.id + ")");

  AugmentedHypothesis out;
  out.parent_id = instance.id;
  out.template_id = tmpl.template_id;
  out.target_label = tmpl.target_label;
  out.mode = tmpl.mode;

  auto acceptable = [&](const std::string& text) {
    if (text.empty() || text == instance.hypothesis) return false;
    auto [pass, matched] = verify_mode_keywords(text, tmpl.mode, keywords);
    if (!pass) return false;
    out.text = text;
    out.verified_keywords = matched;
    return true;
  };

  std::string first;
  try {
    first = generate_text(gw, gw.render(tmpl.prompt_template_id,
                                        {{"scenario", instance.scenario},
                                         {"hypothesis", instance.hypothesis}}));
    if (acceptable(first)) return out;

    // one regeneration with the failed candidate and the expected keywords
    std::string retry_prompt =
        gw.render("aug_retry", {{"previous", first},
                                {"hypothesis", instance.hypothesis},
                                {"keywords", join(keywords.for_mode(tmpl.mode), ", ")}});
    if (acceptable(generate_text(gw, retry_prompt))) return out;
  } catch (const Error& e) {
    throw GenerationFailed("template '" + tmpl.template_id + "' on " + instance.id + ": " +
                           e.what());
  }
  throw GenerationFailed("template '" + tmpl.template_id + "' on " + instance.id +
                         ": candidate failed keyword verification twice");
}

SubprocessScorer::SubprocessScorer(const std::string& command) : command_(command) {
  static std::once_flag sigpipe_once;
  std::call_once(sigpipe_once, [] { std::signal(SIGPIPE, SIG_IGN); });

  int to_child[2];
  int from_child[2];
  if (pipe(to_child) != 0 || pipe(from_child) != 0)
    throw ScorerUnavailable("pipe: " + std::string(std::strerror(errno)));

  pid_t pid = fork();
  if (pid < 0) throw ScorerUnavailable("fork: " + std::string(std::strerror(errno)));
  if (pid == 0) {
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(to_child[0]);
  close(from_child[1]);
  to_child_ = to_child[1];
  from_child_ = from_child[0];
  pid_ = pid;
}

SubprocessScorer::~SubprocessScorer() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  if (pid_ > 0) {
    int status = 0;
    waitpid(static_cast<pid_t>(pid_), &status, 0);
  }
}

ScorerResponse SubprocessScorer::score(const std::string& premise,
                                       const std::string& hypothesis) {
  json req{{"premise", premise}, {"hypothesis", hypothesis}};
  std::string line = req.dump() + "\n";

  std::size_t off = 0;
  while (off < line.size()) {
    ssize_t n = write(to_child_, line.data() + off, line.size() - off);
    if (n <= 0) throw ScorerUnavailable("scorer stdin closed");
    off += static_cast<std::size_t>(n);
  }

  for (;;) {
    std::size_t nl = read_buf_.find('\n');
    if (nl != std::string::npos) {
      std::string reply = read_buf_.substr(0, nl);
      read_buf_.erase(0, nl + 1);
      try {
        json j = json::parse(reply);
        return ScorerResponse{j.at("label").get<std::string>(),
                              j.at("confidence").get<double>()};
      } catch (const json::exception& e) {
        throw ScorerUnavailable("malformed scorer reply: " + std::string(e.what()));
      }
    }
    char buf[512];
    ssize_t n = read(from_child_, buf, sizeof buf);
    if (n <= 0) throw ScorerUnavailable("scorer stdout closed");
    read_buf_.append(buf, static_cast<std::size_t>(n));
  }
}

DifficultyReport difficulty_check(const std::string& orig_premise,
                                  const std::string& orig_hypothesis,
                                  const std::string& aug_premise,
                                  const std::string& aug_hypothesis, NliScorer& scorer) {
  DifficultyReport r;
  try {
    r.orig_score = scorer.score(orig_premise, orig_hypothesis).confidence;
    r.aug_score = scorer.score(aug_premise, aug_hypothesis).confidence;
    r.harder = r.aug_score < r.orig_score;
  } catch (const ScorerUnavailable& e) {
    r = DifficultyReport{};
    r.skipped = true;
    r.note = e.what();
  }
  return r;
}

json to_json(const DifficultyReport& r) {
  return json{{"orig_score", r.orig_score},
              {"aug_score", r.aug_score},
              {"harder", r.harder},
              {"skipped", r.skipped},
              {"note", r.note}};
}

BalanceResult balance_dataset(std::vector<AugmentedHypothesis> pool,
                              const std::map<ReasoningMode, std::size_t>& targets) {
  std::sort(pool.begin(), pool.end(), [](const AugmentedHypothesis& a,
                                         const AugmentedHypothesis& b) {
    return std::tie(a.parent_id, a.template_id, a.text) <
           std::tie(b.parent_id, b.template_id, b.text);
  });

  BalanceResult result;
  std::map<ReasoningMode, std::size_t> taken;
  for (const auto& a : pool) {
    auto it = targets.find(a.mode);
    if (it == targets.end()) continue;
    if (taken[a.mode] >= it->second) continue;
    result.selected.push_back(a);
    ++taken[a.mode];
  }
  for (const auto& [mode, want] : targets) {
    std::size_t got = taken.count(mode) ? taken[mode] : 0;
    if (got < want) result.shortfalls[to_string(mode)] = want - got;
  }
  return result;
}

json to_json(const AugmentedHypothesis& a) {
  return json{{"parent_id", a.parent_id},
              {"template_id", a.template_id},
              {"text", a.text},
              {"target_label", to_string(a.target_label)},
              {"mode", to_string(a.mode)},
              {"verified_keywords", a.verified_keywords}};
}

AugmentedHypothesis augmented_from_json(const json& j) {
  AugmentedHypothesis a;
  try {
    a.parent_id = j.at("parent_id").get<std::string>();
    a.template_id = j.at("template_id").get<std::string>();
    a.text = j.at("text").get<std::string>();
    a.target_label = parse_label(j.at("target_label").get<std::string>());
    a.mode = parse_mode(j.at("mode").get<std::string>());
    a.verified_keywords = j.value("verified_keywords", std::vector<std::string>{});
  } catch (const json::exception& e) {
    throw FormatError(std::string("augmented hypothesis: ") + e.what());
  }
  return a;
}

InstanceRecord to_instance(const InstanceRecord& parent, const AugmentedHypothesis& a) {
  InstanceRecord child = parent;
  child.id = parent.id + "-" + a.template_id;
  child.hypothesis = a.text;
  child.gold_label = a.target_label;
  child.mode = a.mode;
  return child;
}

json augmented_instance_json(const InstanceRecord& parent, const AugmentedHypothesis& a) {
  json j = to_json(to_instance(parent, a));
  j["parent_id"] = a.parent_id;
  j["template_id"] = a.template_id;
  return j;
}

}  // namespace logt
