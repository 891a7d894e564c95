#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "logt/core.hpp"
#include "logt/gateway.hpp"

namespace logt {

// One row of the augmentation registry. The (mode, source, target) triple is
// frozen data; the LLM only ever produces hypothesis text.
struct AugmentationTemplate {
  std::string template_id;
  ReasoningMode mode = ReasoningMode::Negation;
  Label source_label = Label::Entailment;
  Label target_label = Label::Entailment;
  std::string prompt_template_id;

  bool operator==(const AugmentationTemplate&) const = default;
};

struct AugmentedHypothesis {
  std::string parent_id;
  std::string template_id;
  std::string text;
  Label target_label = Label::Entailment;
  ReasoningMode mode = ReasoningMode::Negation;
  std::vector<std::string> verified_keywords;
};

// Per-mode keyword lists for verification. Defaults ship here; callers may
// swap in their own lists.
struct KeywordConfig {
  std::vector<std::string> negation{"not", "never", "shall not", "no", "cannot", "n't"};
  std::vector<std::string> implication{"if", "then", "implies", "leads to", "results in"};
  std::vector<std::string> defeasible{"unless", "except", "however", "but if",
                                      "notwithstanding"};

  const std::vector<std::string>& for_mode(ReasoningMode mode) const;
};

nlohmann::json to_json(const AugmentationTemplate& t);
AugmentationTemplate template_from_json(const nlohmann::json& j);

nlohmann::json registry_to_json(const std::vector<AugmentationTemplate>& reg);
std::vector<AugmentationTemplate> registry_from_json(const nlohmann::json& j);

// Reads the shipped registry file. Throws FormatError on malformed content or
// if the registry does not contain exactly eleven distinct templates.
std::vector<AugmentationTemplate> load_registry(const std::filesystem::path& file);

const AugmentationTemplate& find_template(const std::vector<AugmentationTemplate>& reg,
                                          const std::string& template_id);

// Case-insensitive match of the mode's keyword list against text. Keywords are
// matched at word boundaries ("no" never fires inside "know"); keywords with
// an apostrophe match as plain substrings so "n't" finds "can't".
std::pair<bool, std::vector<std::string>> verify_mode_keywords(
    const std::string& text, ReasoningMode mode, const KeywordConfig& keywords = {});

// One generation call, target label taken from the template. A candidate that
// fails keyword verification (or parrots the original hypothesis) gets exactly
// one regeneration; a second failure discards it via GenerationFailed.
AugmentedHypothesis augment_instance(const InstanceRecord& instance,
                                     const AugmentationTemplate& tmpl, Gateway& gw,
                                     const KeywordConfig& keywords = {});

struct ScorerResponse {
  std::string label;
  double confidence = 0.0;
};

class NliScorer {
 public:
  virtual ~NliScorer() = default;
  virtual ScorerResponse score(const std::string& premise, const std::string& hypothesis) = 0;
  virtual std::string name() const = 0;
};

// Talks newline-delimited JSON to a child process over stdio:
// request {"premise": ..., "hypothesis": ...}, response {"label": ..., "confidence": ...}.
// Any pipe failure or malformed reply surfaces as ScorerUnavailable.
class SubprocessScorer : public NliScorer {
 public:
  explicit SubprocessScorer(const std::string& command);
  ~SubprocessScorer() override;
  SubprocessScorer(const SubprocessScorer&) = delete;
  SubprocessScorer& operator=(const SubprocessScorer&) = delete;

  ScorerResponse score(const std::string& premise, const std::string& hypothesis) override;
  std::string name() const override { return "subprocess:" + command_; }

 private:
  std::string command_;
  int to_child_ = -1;
  int from_child_ = -1;
  long pid_ = -1;
  std::string read_buf_;
};

struct DifficultyReport {
  double orig_score = 0.0;
  double aug_score = 0.0;
  bool harder = false;
  bool skipped = false;
  std::string note;
};

// Advisory: scores the original and augmented pairs and flags whether the
// augmented one looks harder. A dead scorer yields a skipped report, never an
// exception; the augmentation is kept either way.
DifficultyReport difficulty_check(const std::string& orig_premise,
                                  const std::string& orig_hypothesis,
                                  const std::string& aug_premise,
                                  const std::string& aug_hypothesis, NliScorer& scorer);

nlohmann::json to_json(const DifficultyReport& r);

struct BalanceResult {
  std::vector<AugmentedHypothesis> selected;
  // mode name -> missing count, only for modes that fell short of their target
  std::map<std::string, std::size_t> shortfalls;
};

// Deterministic selection: pool sorted by (parent_id, template_id, text), then
// the first k per mode. Modes absent from targets contribute nothing.
BalanceResult balance_dataset(std::vector<AugmentedHypothesis> pool,
                              const std::map<ReasoningMode, std::size_t>& targets);

nlohmann::json to_json(const AugmentedHypothesis& a);
AugmentedHypothesis augmented_from_json(const nlohmann::json& j);

// Child instance in the canonical shape, hypothesis and labels swapped in.
// Its id is "<parent id>-<template id>".
InstanceRecord to_instance(const InstanceRecord& parent, const AugmentedHypothesis& a);

// Canonical JSONL object for the child instance plus the parent_id and
// template_id extension fields.
nlohmann::json augmented_instance_json(const InstanceRecord& parent,
                                       const AugmentedHypothesis& a);

}  // namespace logt
