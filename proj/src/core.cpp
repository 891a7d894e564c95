#include "logt/core.hpp"

#include <algorithm>
#include <cctype>

#include "logt/errors.hpp"

namespace logt {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::string to_string(Label l) {
  switch (l) {
    case Label::Entailment: return "entailment";
    case Label::Contradiction: return "contradiction";
    case Label::Neutral: return "neutral";
  }
  return "neutral";
}

std::string to_string(ReasoningMode m) {
  switch (m) {
    case ReasoningMode::Negation: return "negation";
    case ReasoningMode::Implication: return "implication";
    case ReasoningMode::Defeasible: return "defeasible";
  }
  return "negation";
}

std::string to_string(SourceBenchmark b) {
  switch (b) {
    case SourceBenchmark::ContractNli: return "contractnli";
    case SourceBenchmark::Sara: return "sara";
    case SourceBenchmark::BiomedNli: return "biomednli";
    case SourceBenchmark::Dnd: return "dnd";
    case SourceBenchmark::Custom: return "custom";
  }
  return "custom";
}

std::string to_string(Method m) {
  switch (m) {
    case Method::BasicNd: return "basic_nd";
    case Method::BasicD: return "basic_d";
    case Method::Fs: return "fs";
    case Method::Cot: return "cot";
    case Method::LogtSgc: return "logt_sgc";
    case Method::LogtLc: return "logt_lc";
    case Method::LogtFull: return "logt_full";
  }
  return "basic_nd";
}

std::optional<Label> try_parse_label(const std::string& text) {
  std::string t = lower(trim(text));
  if (t == "entailment") return Label::Entailment;
  if (t == "contradiction") return Label::Contradiction;
  if (t == "neutral") return Label::Neutral;
  // ContractNLI uses "NotMentioned" for the neutral class.
  if (t == "notmentioned" || t == "not_mentioned" || t == "not mentioned") return Label::Neutral;
  return std::nullopt;
}

Label parse_label(const std::string& text) {
  auto l = try_parse_label(text);
  if (!l) throw LabelParseError("not a label: '" + text + "'");
  return *l;
}

ReasoningMode parse_mode(const std::string& text) {
  std::string t = lower(trim(text));
  if (t == "negation") return ReasoningMode::Negation;
  if (t == "implication") return ReasoningMode::Implication;
  if (t == "defeasible" || t == "defeasibility") return ReasoningMode::Defeasible;
  throw FormatError("not a reasoning mode: '" + text + "'");
}

SourceBenchmark parse_benchmark(const std::string& text) {
  std::string t = lower(trim(text));
  if (t == "contractnli") return SourceBenchmark::ContractNli;
  if (t == "sara") return SourceBenchmark::Sara;
  if (t == "biomednli") return SourceBenchmark::BiomedNli;
  if (t == "dnd") return SourceBenchmark::Dnd;
  if (t == "custom") return SourceBenchmark::Custom;
  throw FormatError("not a benchmark name: '" + text + "'");
}

Method parse_method(const std::string& text) {
  std::string t = lower(trim(text));
  if (t == "basic_nd") return Method::BasicNd;
  if (t == "basic_d") return Method::BasicD;
  if (t == "fs") return Method::Fs;
  if (t == "cot") return Method::Cot;
  if (t == "logt_sgc") return Method::LogtSgc;
  if (t == "logt_lc") return Method::LogtLc;
  if (t == "logt_full") return Method::LogtFull;
  throw FormatError("not a method name: '" + text + "'");
}

nlohmann::json to_json(const InstanceRecord& r) {
  return nlohmann::json{
      {"id", r.id},
      {"guidelines", r.guidelines},
      {"scenario", r.scenario},
      {"hypothesis", r.hypothesis},
      {"label", to_string(r.gold_label)},
      {"mode", to_string(r.mode)},
      {"source_benchmark", to_string(r.source_benchmark)},
  };
}

InstanceRecord instance_from_json(const nlohmann::json& j) {
  InstanceRecord r;
  try {
    r.id = j.at("id").get<std::string>();
    r.guidelines = j.at("guidelines").get<std::string>();
    r.scenario = j.at("scenario").get<std::string>();
    r.hypothesis = j.at("hypothesis").get<std::string>();
    r.gold_label = parse_label(j.at("label").get<std::string>());
    r.mode = parse_mode(j.at("mode").get<std::string>());
    r.source_benchmark =
        j.contains("source_benchmark") ? parse_benchmark(j.at("source_benchmark").get<std::string>())
                                       : SourceBenchmark::Custom;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad instance record: ") + e.what());
  } catch (const LabelParseError& e) {
    throw FormatError(std::string("bad instance record: ") + e.what());
  }
  if (r.id.empty()) throw FormatError("instance id must be nonempty");
  if (r.guidelines.empty() || r.scenario.empty() || r.hypothesis.empty())
    throw FormatError("instance " + r.id + ": guidelines/scenario/hypothesis must be nonempty");
  return r;
}

nlohmann::json to_json(const Prediction& p) {
  return nlohmann::json{
      {"instance_id", p.instance_id},
      {"label", to_string(p.predicted_label)},
      {"raw_trace", p.raw_trace},
      {"method", to_string(p.method)},
      {"answered", p.answered},
  };
}

Prediction prediction_from_json(const nlohmann::json& j) {
  Prediction p;
  try {
    p.instance_id = j.at("instance_id").get<std::string>();
    p.predicted_label = parse_label(j.at("label").get<std::string>());
    p.raw_trace = j.value("raw_trace", std::string());
    p.method = parse_method(j.at("method").get<std::string>());
    p.answered = j.value("answered", true);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad prediction record: ") + e.what());
  }
  return p;
}

}  // namespace logt
