#include "logt/trace.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "logt/errors.hpp"

namespace logt {

using nlohmann::json;

std::string to_string(StepType t) {
  switch (t) {
    case StepType::FactLookup: return "fact_lookup";
    case StepType::ApplyRule: return "apply_rule";
    case StepType::CheckCondition: return "check_condition";
    case StepType::ResolveConflictOverride: return "resolve_conflict_override";
    case StepType::ContradictionDetected: return "contradiction_detected";
    case StepType::ConcludeLabel: return "conclude_label";
  }
  return "check_condition";
}

std::optional<StepType> try_parse_step_type(const std::string& text) {
  if (text == "fact_lookup") return StepType::FactLookup;
  if (text == "apply_rule") return StepType::ApplyRule;
  if (text == "check_condition") return StepType::CheckCondition;
  if (text == "resolve_conflict_override") return StepType::ResolveConflictOverride;
  if (text == "contradiction_detected") return StepType::ContradictionDetected;
  if (text == "conclude_label") return StepType::ConcludeLabel;
  return std::nullopt;
}

OrganizedTrace organize_trace(const std::string& raw, Gateway& gw,
                              const std::string& instance_id, Method method) {
  if (raw.empty()) throw EmptyInput("organize_trace: empty raw trace");

  OrganizedTrace out;
  out.instance_id = instance_id;
  out.method = method;

  json v;
  bool failed = false;
  try {
    std::string completion =
        gw.complete_template("organize_trace", {{"trace", raw}}, Preset::Reasoning);
    v = gw.extract_structured(completion, "trace_steps");
  } catch (const Error& e) {
    failed = true;
    out.diagnostics.push_back(std::string("organize failed, raw trace kept whole: ") + e.what());
  }

  if (failed) {
    out.steps.push_back({0, StepType::ConcludeLabel, raw, {}, {}});
    return out;
  }

  for (const json& s : v["steps"]) {
    TraceStep step;
    step.text = s["text"].get<std::string>();
    std::string type_text = s["type"].get<std::string>();
    if (auto t = try_parse_step_type(type_text)) {
      step.step_type = *t;
    } else {
      step.step_type = StepType::CheckCondition;
      out.diagnostics.push_back("unknown step type '" + type_text +
                                "' coerced to check_condition");
    }
    out.steps.push_back(std::move(step));
  }

  // conclude_label may only close the trace; demote strays.
  for (size_t i = 0; i + 1 < out.steps.size(); ++i) {
    if (out.steps[i].step_type == StepType::ConcludeLabel) {
      out.steps[i].step_type = StepType::CheckCondition;
      out.diagnostics.push_back("mid-trace conclude_label at step " + std::to_string(i) +
                                " coerced to check_condition");
    }
  }
  for (size_t i = 0; i < out.steps.size(); ++i) out.steps[i].index = static_cast<int>(i);
  return out;
}

std::vector<std::string> provenance_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  };
  unsigned char prev = 0;
  for (size_t i = 0; i < text.size(); ++i) {
    unsigned char c = text[i];
    if (std::isalnum(c)) {
      // camelCase boundary: lower/digit followed by upper starts a new token
      if (!cur.empty() && std::isupper(c) && !std::isupper(prev)) flush();
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
    prev = c;
  }
  flush();
  return out;
}

static double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::set<std::string> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  if (sa.empty() && sb.empty()) return 0.0;
  size_t inter = 0;
  for (const std::string& t : sa) inter += sb.count(t);
  size_t uni = sa.size() + sb.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

OrganizedTrace link_provenance(const OrganizedTrace& trace, const SymbolicContext& csym) {
  OrganizedTrace out = trace;
  for (TraceStep& step : out.steps) {
    step.triple_index.reset();
    step.node_id.reset();
    std::vector<std::string> step_tokens = provenance_tokens(step.text);

    if (step.step_type == StepType::FactLookup) {
      double best = 0.0;
      for (size_t i = 0; i < csym.triples.size(); ++i) {
        double score = jaccard(step_tokens, provenance_tokens(triple_text(csym.triples[i])));
        if (score >= 0.5 && score > best) {
          best = score;
          step.triple_index = static_cast<int>(i);
        }
      }
    } else if (step.step_type == StepType::ApplyRule) {
      double best = 0.0;
      for (const OntologyNode& n : csym.ontology.nodes) {
        if (n.kind != "rule") continue;
        double score = jaccard(step_tokens, provenance_tokens(n.label));
        if (score >= 0.5 && score > best) {
          best = score;
          step.node_id = n.id;
        }
      }
    }
  }
  return out;
}

static std::string steps_text(const OrganizedTrace& trace) {
  std::ostringstream out;
  for (const TraceStep& s : trace.steps)
    out << s.index << ". [" << to_string(s.step_type) << "] " << s.text << "\n";
  return out.str();
}

ReasonVerdict judge_reason_correctness(const OrganizedTrace& trace, const SymbolicContext& csym,
                                       Label gold, Label predicted, Gateway& gw) {
  ReasonVerdict verdict;
  verdict.instance_id = trace.instance_id;
  verdict.prediction_correct = gold == predicted;

  std::string context = ontology_to_text(csym.ontology) + triples_to_text(csym.triples);
  if (context.empty()) context = "(none)\n";
  try {
    std::string completion = gw.complete_template(
        "judge", {{"context", context}, {"steps", steps_text(trace)}}, Preset::Reasoning);
    // The contract is a final "VERDICT: correct|flawed" line.
    std::string lowered = completion;
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    size_t at = lowered.rfind("verdict:");
    if (at == std::string::npos) throw JudgeFailed("no VERDICT line in the judge reply");
    std::istringstream rest(lowered.substr(at + 8));
    std::string word;
    rest >> word;
    if (word == "correct")
      verdict.reasoning_correct = true;
    else if (word == "flawed")
      verdict.reasoning_correct = false;
    else
      throw JudgeFailed("unreadable verdict '" + word + "'");
    verdict.judge_rationale = completion;
  } catch (const Error& e) {
    verdict.reasoning_correct = false;
    verdict.judge_rationale = std::string("judge failed, counted flawed: ") + e.what();
  }
  return verdict;
}

// Half-up mean in hundredths, rendered with exactly two decimals.
static std::string mean_2dp(long long sum, long long n) {
  long long hundredths = (200 * sum + n) / (2 * n);
  std::ostringstream out;
  out << hundredths / 100 << "." << (hundredths % 100 < 10 ? "0" : "")
      << hundredths % 100;
  return out.str();
}

static const StepType kAllTypes[] = {
    StepType::FactLookup,          StepType::ApplyRule,
    StepType::CheckCondition,      StepType::ResolveConflictOverride,
    StepType::ContradictionDetected, StepType::ConcludeLabel,
};

json aggregate_step_stats(const std::vector<OrganizedTrace>& traces) {
  if (traces.empty()) throw EmptyInput("aggregate_step_stats: no traces");

  struct Bucket {
    long long traces = 0;
    long long total = 0;
    std::map<std::string, long long> by_type;
  };
  std::map<std::string, Bucket> buckets;
  for (const OrganizedTrace& t : traces) {
    Bucket& b = buckets[to_string(t.method)];
    b.traces += 1;
    b.total += static_cast<long long>(t.steps.size());
    for (const TraceStep& s : t.steps) b.by_type[to_string(s.step_type)] += 1;
  }

  json methods = json::object();
  for (const auto& [method, b] : buckets) {
    json by_type_counts = json::object();
    json by_type_means = json::object();
    for (StepType t : kAllTypes) {
      std::string name = to_string(t);
      long long count = b.by_type.count(name) ? b.by_type.at(name) : 0;
      by_type_counts[name] = count;
      by_type_means[name] = mean_2dp(count, b.traces);
    }
    methods[method] = {{"traces", b.traces},
                       {"total_steps", b.total},
                       {"count_by_type", by_type_counts},
                       {"mean_by_type", by_type_means},
                       {"mean_total", mean_2dp(b.total, b.traces)}};
  }
  return {{"methods", methods}};
}

// Half-up integer percent.
static long long pct(long long cell, long long total) {
  if (total == 0) return 0;
  return (200 * cell + total) / (2 * total);
}

json confusion(const std::vector<ReasonVerdict>& verdicts) {
  if (verdicts.empty()) throw EmptyInput("confusion: no verdicts");

  long long c[2][2] = {{0, 0}, {0, 0}};  // [reasoning][prediction], 1 = correct
  for (const ReasonVerdict& v : verdicts)
    c[v.reasoning_correct ? 1 : 0][v.prediction_correct ? 1 : 0] += 1;

  auto row = [&](int r) {
    long long total = c[r][0] + c[r][1];
    return json{{"prediction_correct", c[r][1]},
                {"prediction_wrong", c[r][0]},
                {"prediction_correct_pct", pct(c[r][1], total)},
                {"prediction_wrong_pct", pct(c[r][0], total)}};
  };
  return {{"total", static_cast<long long>(verdicts.size())},
          {"reasoning_correct", row(1)},
          {"reasoning_wrong", row(0)}};
}

json to_json(const OrganizedTrace& t) {
  json steps = json::array();
  for (const TraceStep& s : t.steps) {
    json js = {{"index", s.index}, {"type", to_string(s.step_type)}, {"text", s.text}};
    if (s.triple_index) js["provenance"] = {{"triple", *s.triple_index}};
    if (s.node_id) js["provenance"] = {{"node", *s.node_id}};
    steps.push_back(std::move(js));
  }
  return {{"instance_id", t.instance_id},
          {"method", to_string(t.method)},
          {"steps", steps},
          {"diagnostics", t.diagnostics}};
}

OrganizedTrace trace_from_json(const json& v) {
  OrganizedTrace t;
  t.instance_id = v.at("instance_id").get<std::string>();
  t.method = parse_method(v.at("method").get<std::string>());
  for (const json& js : v.at("steps")) {
    TraceStep s;
    s.index = js.at("index").get<int>();
    auto type = try_parse_step_type(js.at("type").get<std::string>());
    if (!type) throw FormatError("bad step type in trace record");
    s.step_type = *type;
    s.text = js.at("text").get<std::string>();
    if (js.contains("provenance")) {
      const json& p = js["provenance"];
      if (p.contains("triple")) s.triple_index = p["triple"].get<int>();
      if (p.contains("node")) s.node_id = p["node"].get<std::string>();
    }
    t.steps.push_back(std::move(s));
  }
  if (v.contains("diagnostics"))
    for (const json& d : v["diagnostics"]) t.diagnostics.push_back(d.get<std::string>());
  return t;
}

json to_json(const ReasonVerdict& v) {
  return {{"instance_id", v.instance_id},
          {"reasoning_correct", v.reasoning_correct},
          {"prediction_correct", v.prediction_correct},
          {"judge_rationale", v.judge_rationale}};
}

ReasonVerdict verdict_from_json(const json& v) {
  ReasonVerdict out;
  out.instance_id = v.at("instance_id").get<std::string>();
  out.reasoning_correct = v.at("reasoning_correct").get<bool>();
  out.prediction_correct = v.at("prediction_correct").get<bool>();
  out.judge_rationale = v.value("judge_rationale", "");
  return out;
}

}  // namespace logt
