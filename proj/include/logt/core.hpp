#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace logt {

enum class Label { Entailment, Contradiction, Neutral };

enum class ReasoningMode { Negation, Implication, Defeasible };

enum class SourceBenchmark { ContractNli, Sara, BiomedNli, Dnd, Custom };

enum class Method {
  BasicNd,
  BasicD,
  Fs,
  Cot,
  LogtSgc,
  LogtLc,
  LogtFull,
};

std::string to_string(Label l);
std::string to_string(ReasoningMode m);
std::string to_string(SourceBenchmark b);
std::string to_string(Method m);

// Strict three-way parse; throws LabelParseError on anything else.
// Case-insensitive; maps ContractNLI's "NotMentioned" family to neutral.
Label parse_label(const std::string& text);
std::optional<Label> try_parse_label(const std::string& text);

ReasoningMode parse_mode(const std::string& text);  // throws FormatError
SourceBenchmark parse_benchmark(const std::string& text);
Method parse_method(const std::string& text);

// One benchmark item: guidelines, scenario, hypothesis, gold label, mode.
struct InstanceRecord {
  std::string id;
  std::string guidelines;
  std::string scenario;
  std::string hypothesis;
  Label gold_label = Label::Neutral;
  ReasoningMode mode = ReasoningMode::Negation;
  SourceBenchmark source_benchmark = SourceBenchmark::Custom;

  bool operator==(const InstanceRecord&) const = default;
};

struct Prediction {
  std::string instance_id;
  Label predicted_label = Label::Neutral;
  std::string raw_trace;
  Method method = Method::BasicNd;
  // Extension over the wire schema: false when the model never produced a
  // parseable label. Unanswered predictions score as incorrect.
  bool answered = true;

  bool operator==(const Prediction&) const = default;
};

// Canonical JSONL record shape (keys: id, guidelines, scenario, hypothesis,
// label, mode, source_benchmark). Dataset-level load/save lives in harness.
nlohmann::json to_json(const InstanceRecord& r);
InstanceRecord instance_from_json(const nlohmann::json& j);  // throws FormatError

nlohmann::json to_json(const Prediction& p);
Prediction prediction_from_json(const nlohmann::json& j);

}  // namespace logt
