#include "logt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "logt/context.hpp"
#include "logt/errors.hpp"
#include "logt/synthesizer.hpp"

namespace logt {

using nlohmann::json;

std::string to_string(DatasetFormat f) {
  switch (f) {
    case DatasetFormat::CanonicalJsonl: return "canonical_jsonl";
    case DatasetFormat::ContractNliNative: return "contractnli_native";
    case DatasetFormat::SaraNative: return "sara_native";
    case DatasetFormat::BiomedNliNative: return "biomednli_native";
    case DatasetFormat::DndNative: return "dnd_native";
  }
  return "canonical_jsonl";
}

DatasetFormat parse_dataset_format(const std::string& text) {
  for (DatasetFormat f : {DatasetFormat::CanonicalJsonl, DatasetFormat::ContractNliNative,
                          DatasetFormat::SaraNative, DatasetFormat::BiomedNliNative,
                          DatasetFormat::DndNative})
    if (to_string(f) == text) return f;
  throw FormatError("not a dataset format: '" + text + "'");
}

ReasoningMode classify_mode(const std::string& hypothesis, const KeywordConfig& kw) {
  if (verify_mode_keywords(hypothesis, ReasoningMode::Defeasible, kw).first)
    return ReasoningMode::Defeasible;
  if (verify_mode_keywords(hypothesis, ReasoningMode::Negation, kw).first)
    return ReasoningMode::Negation;
  return ReasoningMode::Implication;
}

namespace {

std::string need(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string() || j[key].get<std::string>().empty())
    throw FormatError(std::string("missing field '") + key + "'");
  return j[key].get<std::string>();
}

ReasoningMode mode_or_classified(const json& j, const std::string& hypothesis) {
  if (j.contains("mode")) return parse_mode(j["mode"].get<std::string>());
  return classify_mode(hypothesis);
}

InstanceRecord from_native(const json& j, DatasetFormat format) {
  InstanceRecord r;
  switch (format) {
    case DatasetFormat::ContractNliNative:
      // The contract is both the norm source and the facts to judge against.
      r.id = need(j, "id");
      r.guidelines = need(j, "document");
      r.scenario = r.guidelines;
      r.hypothesis = need(j, "hypothesis");
      r.gold_label = parse_label(need(j, "choice"));
      r.source_benchmark = SourceBenchmark::ContractNli;
      break;
    case DatasetFormat::SaraNative:
      r.id = need(j, "id");
      r.guidelines = need(j, "statutes");
      r.scenario = need(j, "case");
      r.hypothesis = need(j, "question");
      r.gold_label = parse_label(need(j, "answer"));
      r.source_benchmark = SourceBenchmark::Sara;
      break;
    case DatasetFormat::BiomedNliNative:
      r.id = need(j, "id");
      r.guidelines = need(j, "guideline");
      r.scenario = need(j, "presentation");
      r.hypothesis = need(j, "statement");
      r.gold_label = parse_label(need(j, "label"));
      r.source_benchmark = SourceBenchmark::BiomedNli;
      break;
    case DatasetFormat::DndNative:
      r.id = need(j, "id");
      r.guidelines = need(j, "rules");
      r.scenario = need(j, "state");
      r.hypothesis = need(j, "claim");
      r.gold_label = parse_label(need(j, "label"));
      r.source_benchmark = SourceBenchmark::Dnd;
      break;
    case DatasetFormat::CanonicalJsonl: break;  // handled by the caller
  }
  r.mode = mode_or_classified(j, r.hypothesis);
  return r;
}

}  // namespace

std::vector<InstanceRecord> load_dataset(const std::filesystem::path& path,
                                         DatasetFormat format, LoadReport* report) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read dataset: " + path.string());

  std::vector<InstanceRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json j = json::parse(line);
      out.push_back(format == DatasetFormat::CanonicalJsonl ? instance_from_json(j)
                                                            : from_native(j, format));
    } catch (const json::exception& e) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const Error& e) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }

  if (report) {
    report->count = out.size();
    for (const auto& r : out) ++report->per_mode[to_string(r.mode)];
    if (out.empty()) report->warnings.push_back("dataset " + path.string() + " is empty");
  }
  return out;
}

std::vector<InstanceRecord> select_exemplars(const std::vector<InstanceRecord>& pool) {
  std::vector<InstanceRecord> out;
  for (Label l : {Label::Entailment, Label::Contradiction, Label::Neutral}) {
    auto it = std::find_if(pool.begin(), pool.end(),
                           [&](const InstanceRecord& r) { return r.gold_label == l; });
    if (it == pool.end())
      throw EvaluationFailed("exemplar pool has no " + to_string(l) + " instance");
    out.push_back(*it);
  }
  return out;
}

std::string exemplar_block(const std::vector<InstanceRecord>& exemplars) {
  std::string out;
  for (std::size_t i = 0; i < exemplars.size(); ++i) {
    const auto& e = exemplars[i];
    out += "Example " + std::to_string(i + 1) + "\n";
    out += "Guidelines: " + e.guidelines + "\n";
    out += "Scenario: " + e.scenario + "\n";
    out += "Hypothesis: " + e.hypothesis + "\n";
    out += "Answer: " + to_string(e.gold_label) + "\n\n";
  }
  return out;
}

namespace {

void check_spec(const MethodSpec& spec) {
  if (spec.cot_steps < 1) throw EvaluationFailed("cot_steps must be >= 1");
  if (spec.method == Method::Fs) {
    bool seen[3] = {false, false, false};
    for (const auto& e : spec.few_shot_examples) {
      int idx = static_cast<int>(e.gold_label);
      if (seen[idx])
        throw EvaluationFailed("fs needs exactly one exemplar per label, got two for " +
                               to_string(e.gold_label));
      seen[idx] = true;
    }
    if (spec.few_shot_examples.size() != 3 || !(seen[0] && seen[1] && seen[2]))
      throw EvaluationFailed("fs needs exactly one exemplar per label");
  }
}

ContextMask mask_for(Method m) {
  switch (m) {
    case Method::LogtSgc: return ContextMask::SymbolicOnly;
    case Method::LogtLc: return ContextMask::LogicOnly;
    default: return ContextMask::Full;
  }
}

bool is_logt(Method m) {
  return m == Method::LogtSgc || m == Method::LogtLc || m == Method::LogtFull;
}

bool is_baseline(Method m) { return !is_logt(m); }

}  // namespace

std::string render_method_prompt(const MethodSpec& spec, const InstanceRecord& instance,
                                 Gateway& gw) {
  switch (spec.method) {
    case Method::BasicNd:
      return gw.render("basic_nd",
                       {{"scenario", instance.scenario}, {"hypothesis", instance.hypothesis}});
    case Method::BasicD:
      return gw.render("basic_d", {{"guidelines", instance.guidelines},
                                   {"scenario", instance.scenario},
                                   {"hypothesis", instance.hypothesis}});
    case Method::Fs:
      return gw.render("fs", {{"exemplars", exemplar_block(spec.few_shot_examples)},
                              {"guidelines", instance.guidelines},
                              {"scenario", instance.scenario},
                              {"hypothesis", instance.hypothesis}});
    case Method::Cot:
      return gw.render("cot_rationale", {{"guidelines", instance.guidelines},
                                         {"scenario", instance.scenario},
                                         {"hypothesis", instance.hypothesis}});
    default:
      throw EvaluationFailed("no single prompt for " + to_string(spec.method) +
                             "; LogT prompts come from the grounded reasoner");
  }
}

std::string render_cot_answer_prompt(const InstanceRecord& instance,
                                     const std::string& rationale, Gateway& gw) {
  return gw.render("cot_answer", {{"guidelines", instance.guidelines},
                                  {"scenario", instance.scenario},
                                  {"hypothesis", instance.hypothesis},
                                  {"rationale", rationale}});
}

namespace {

Prediction run_one(const MethodSpec& spec, const InstanceRecord& inst, Gateway& gw,
                   const HarnessConfig& cfg) {
  Prediction p;
  p.instance_id = inst.id;
  p.method = spec.method;
  try {
    if (is_baseline(spec.method) && spec.method != Method::Cot) {
      std::string completion =
          gw.complete(render_method_prompt(spec, inst, gw), Preset::Prediction);
      p.predicted_label = parse_label(
          gw.extract_structured(completion, "label_only").at("label").get<std::string>());
      p.raw_trace = completion;
    } else if (spec.method == Method::Cot) {
      std::string rationale =
          gw.complete(render_method_prompt(spec, inst, gw), Preset::Reasoning);
      std::string completion =
          gw.complete(render_cot_answer_prompt(inst, rationale, gw), Preset::Prediction);
      p.predicted_label = parse_label(
          gw.extract_structured(completion, "label_only").at("label").get<std::string>());
      p.raw_trace = rationale + "\n\n" + completion;
    } else {
      SymbolicContext csym = run_stage1(inst, gw);
      LogicContext clog = build_logic_context(csym, gw, cfg.engine);
      GroundedResult res = evaluate_hypothesis({csym, clog, inst.hypothesis}, gw,
                                               mask_for(spec.method), cfg.reasoner);
      p.predicted_label = res.label;
      p.raw_trace = res.raw_trace;
    }
  } catch (const std::exception& e) {
    p.answered = false;
    p.predicted_label = Label::Neutral;
    p.raw_trace = std::string("unanswered: ") + e.what();
  }
  return p;
}

}  // namespace

std::vector<Prediction> run_method(const MethodSpec& spec,
                                   const std::vector<InstanceRecord>& instances, Gateway& gw,
                                   const HarnessConfig& cfg) {
  check_spec(spec);
  std::vector<Prediction> out(instances.size());
  if (instances.empty()) return out;

  int workers = std::max(1, std::min<int>(cfg.workers, static_cast<int>(instances.size())));
  std::atomic<std::size_t> cursor{0};
  auto drain = [&] {
    for (std::size_t i; (i = cursor.fetch_add(1)) < instances.size();)
      out[i] = run_one(spec, instances[i], gw, cfg);
  };

  std::vector<std::thread> threads;
  for (int w = 1; w < workers; ++w) threads.emplace_back(drain);
  drain();
  for (auto& t : threads) t.join();
  return out;
}

namespace {

// percent with two decimals, half-up
std::string pct_2dp(double fraction) {
  long hundredths = std::lround(std::floor(fraction * 10000.0 + 0.5));
  std::string out = std::to_string(hundredths / 100) + ".";
  long rem = hundredths % 100;
  out += static_cast<char>('0' + rem / 10);
  out += static_cast<char>('0' + rem % 10);
  return out;
}

}  // namespace

Accuracy accuracy_with_se(const std::vector<Prediction>& preds,
                          const std::vector<Label>& golds) {
  if (preds.size() != golds.size())
    throw FormatError("predictions/golds length mismatch: " + std::to_string(preds.size()) +
                      " vs " + std::to_string(golds.size()));
  if (preds.empty()) throw EmptyInput("no predictions to score");

  Accuracy a;
  a.n = preds.size();
  for (std::size_t i = 0; i < preds.size(); ++i)
    if (preds[i].answered && preds[i].predicted_label == golds[i]) ++a.correct;
  a.accuracy = static_cast<double>(a.correct) / static_cast<double>(a.n);
  a.se = std::sqrt(a.accuracy * (1.0 - a.accuracy) / static_cast<double>(a.n));
  a.accuracy_pct = pct_2dp(a.accuracy);
  a.se_pct = pct_2dp(a.se);
  return a;
}

ResultRow score_method(const std::string& benchmark, const std::string& model_id,
                       Method method, const std::vector<InstanceRecord>& instances,
                       const std::vector<Prediction>& preds) {
  if (instances.size() != preds.size())
    throw FormatError("instances/predictions length mismatch");
  std::vector<Label> golds;
  for (const auto& r : instances) golds.push_back(r.gold_label);
  Accuracy overall = accuracy_with_se(preds, golds);

  ResultRow row;
  row.benchmark = benchmark;
  row.model_id = model_id;
  row.method = method;
  row.accuracy = overall.accuracy;
  row.se = overall.se;
  row.n = overall.n;

  for (std::size_t i = 0; i < instances.size(); ++i) {
    ModeCell& cell = row.per_mode[to_string(instances[i].mode)];
    ++cell.n;
    if (preds[i].answered && preds[i].predicted_label == golds[i]) ++cell.correct;
  }
  for (auto& [mode, cell] : row.per_mode)
    cell.accuracy = static_cast<double>(cell.correct) / static_cast<double>(cell.n);
  return row;
}

json to_json(const ResultRow& row) {
  json per_mode = json::object();
  for (const auto& [mode, cell] : row.per_mode)
    per_mode[mode] = json{{"accuracy_pct", pct_2dp(cell.accuracy)},
                          {"n", cell.n},
                          {"correct", cell.correct}};
  return json{{"benchmark", row.benchmark},
              {"model_id", row.model_id},
              {"method", to_string(row.method)},
              {"accuracy", row.accuracy},
              {"accuracy_pct", pct_2dp(row.accuracy)},
              {"stderr", row.se},
              {"stderr_pct", pct_2dp(row.se)},
              {"n", row.n},
              {"per_mode", per_mode}};
}

namespace {

// signed points with one decimal, half-up on the magnitude
std::string delta_points(double diff_fraction) {
  double points = diff_fraction * 100.0;
  long tenths = std::lround(std::floor(std::fabs(points) * 10.0 + 0.5));
  std::string out = points < 0 && tenths != 0 ? "-" : "+";
  out += std::to_string(tenths / 10) + "." + static_cast<char>('0' + tenths % 10);
  return out;
}

}  // namespace

json per_mode_report(const std::vector<ResultRow>& rows) {
  std::map<std::pair<std::string, std::string>, std::vector<const ResultRow*>> groups;
  for (const auto& r : rows) groups[{r.benchmark, r.model_id}].push_back(&r);

  json report = json::object();
  for (const auto& [key, group] : groups) {
    std::vector<const ResultRow*> baselines, logts;
    for (const ResultRow* r : group)
      (is_baseline(r->method) ? baselines : logts).push_back(r);
    if (baselines.empty() || logts.empty())
      throw MissingBaseline("benchmark " + key.first + " / " + key.second +
                            " needs both a baseline and a LogT row");

    json model_entry = json::object();
    for (const ResultRow* lr : logts) {
      json method_entry = json::object();

      auto add_delta = [&](const std::string& bucket, double logt_acc,
                           std::vector<double> base_accs) {
        if (base_accs.empty()) return;
        double best = *std::max_element(base_accs.begin(), base_accs.end());
        double mean = 0.0;
        for (double b : base_accs) mean += b;
        mean /= static_cast<double>(base_accs.size());
        method_entry[bucket] = json{{"vs_best", delta_points(logt_acc - best)},
                                    {"vs_mean", delta_points(logt_acc - mean)}};
      };

      std::vector<double> overall;
      for (const ResultRow* b : baselines) overall.push_back(b->accuracy);
      add_delta("overall", lr->accuracy, overall);

      for (const auto& [mode, cell] : lr->per_mode) {
        std::vector<double> accs;
        for (const ResultRow* b : baselines) {
          auto it = b->per_mode.find(mode);
          if (it != b->per_mode.end()) accs.push_back(it->second.accuracy);
        }
        add_delta(mode, cell.accuracy, accs);
      }
      model_entry[to_string(lr->method)] = method_entry;
    }
    report[key.first][key.second] = model_entry;
  }
  return report;
}

RunMeta collect_run_meta(const Gateway& gw, const std::string& exemplar_file) {
  RunMeta meta;
  meta.model_id = gw.config().model.model_id;
  for (const auto& id : gw.templates().ids())
    meta.template_hashes[id] = sha256_hex(gw.templates().body(id));
  GatewayStats stats = gw.stats();
  meta.provider_calls = stats.provider_calls;
  meta.cache_hits = stats.cache_hits;
  meta.repairs = stats.repairs;
  meta.seeds["prediction"] = preset_params(Preset::Prediction).seed;
  meta.seeds["reasoning"] = preset_params(Preset::Reasoning).seed;
  meta.exemplar_file = exemplar_file;
  return meta;
}

namespace {

std::vector<ResultRow> sorted_rows(std::vector<ResultRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.benchmark, a.model_id, a.method) <
           std::tie(b.benchmark, b.model_id, b.method);
  });
  return rows;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out << content;
}

}  // namespace

std::string results_table_text(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << "method        accuracy          n\n";
  std::string group;
  for (const auto& row : sorted_rows(rows)) {
    std::string key = row.benchmark + " / " + row.model_id;
    if (key != group) {
      group = key;
      out << "\n== " << key << " ==\n";
    }
    std::string method = to_string(row.method);
    method.resize(12, ' ');
    std::string cell = pct_2dp(row.accuracy) + " (\xC2\xB1" + pct_2dp(row.se) + ")";
    cell.resize(cell.size() < 18 ? 18 : cell.size(), ' ');
    out << method << "  " << cell << "  " << row.n << "\n";
  }
  return out.str();
}

void emit_report(const std::vector<ResultRow>& rows, const json& trace_stats,
                 const json& confusion, const RunMeta& meta,
                 const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<ResultRow> ordered = sorted_rows(rows);

  json results;
  results["rows"] = json::array();
  for (const auto& row : ordered) results["rows"].push_back(to_json(row));
  if (!trace_stats.is_null()) results["trace_stats"] = trace_stats;
  if (!confusion.is_null()) results["confusion"] = confusion;
  write_file(out_dir / "results.json", results.dump(2) + "\n");

  write_file(out_dir / "results_table.txt", results_table_text(ordered));

  std::ostringstream csv;
  csv << "benchmark,model_id,method,mode,accuracy_pct,n\n";
  for (const auto& row : ordered)
    for (const auto& [mode, cell] : row.per_mode)
      csv << row.benchmark << "," << row.model_id << "," << to_string(row.method) << ","
          << mode << "," << pct_2dp(cell.accuracy) << "," << cell.n << "\n";
  write_file(out_dir / "per_mode.csv", csv.str());

  json run;
  run["model_id"] = meta.model_id;
  run["template_hashes"] = meta.template_hashes;
  run["provider_calls"] = meta.provider_calls;
  run["cache_hits"] = meta.cache_hits;
  run["repairs"] = meta.repairs;
  run["seeds"] = meta.seeds;
  if (!meta.exemplar_file.empty()) run["exemplar_file"] = meta.exemplar_file;
  write_file(out_dir / "run.json", run.dump(2) + "\n");
}

}  // namespace logt
