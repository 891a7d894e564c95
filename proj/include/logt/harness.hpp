#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "logt/augment.hpp"
#include "logt/core.hpp"
#include "logt/gateway.hpp"
#include "logt/logic/engine.hpp"
#include "logt/reasoner.hpp"

namespace logt {

enum class DatasetFormat {
  CanonicalJsonl,
  ContractNliNative,
  SaraNative,
  BiomedNliNative,
  DndNative,
};

std::string to_string(DatasetFormat f);
DatasetFormat parse_dataset_format(const std::string& text);  // throws FormatError

struct LoadReport {
  std::size_t count = 0;
  std::map<std::string, std::size_t> per_mode;
  std::vector<std::string> warnings;
};

// Native rows without a mode tag get one from hypothesis keywords: defeasible
// markers win, then negation, then implication; unmarked text counts as
// implication.
ReasoningMode classify_mode(const std::string& hypothesis, const KeywordConfig& kw = {});

// One JSON object per line. Canonical rows parse bit-exactly; the native
// formats are thin per-benchmark adapters onto the same record. Malformed
// lines raise FormatError naming the line number.
std::vector<InstanceRecord> load_dataset(const std::filesystem::path& path,
                                         DatasetFormat format, LoadReport* report = nullptr);

struct MethodSpec {
  Method method = Method::BasicNd;
  // exactly one solved instance per label, used only by fs
  std::vector<InstanceRecord> few_shot_examples;
  int cot_steps = 2;
};

struct HarnessConfig {
  logic::EngineConfig engine;
  ReasonerConfig reasoner;
  int workers = 1;
};

// First instance per label in file order. Throws EvaluationFailed when a
// label has no representative.
std::vector<InstanceRecord> select_exemplars(const std::vector<InstanceRecord>& pool);

std::string exemplar_block(const std::vector<InstanceRecord>& exemplars);

// The single prompt for basic_nd/basic_d/fs, or the rationale prompt for cot.
// LogT prompts come out of render_grounded_prompt instead.
std::string render_method_prompt(const MethodSpec& spec, const InstanceRecord& instance,
                                 Gateway& gw);

std::string render_cot_answer_prompt(const InstanceRecord& instance,
                                     const std::string& rationale, Gateway& gw);

// Runs one method over the whole set with a bounded worker pool. Every
// instance yields exactly one Prediction, in input order; per-instance
// failures come back unanswered and the run continues.
std::vector<Prediction> run_method(const MethodSpec& spec,
                                   const std::vector<InstanceRecord>& instances, Gateway& gw,
                                   const HarnessConfig& cfg = {});

struct Accuracy {
  double accuracy = 0.0;
  double se = 0.0;
  std::size_t n = 0;
  std::size_t correct = 0;
  std::string accuracy_pct;  // percent, two decimals, half-up
  std::string se_pct;
};

// Unanswered predictions score as incorrect. Throws EmptyInput on n = 0 and
// FormatError on length mismatch.
Accuracy accuracy_with_se(const std::vector<Prediction>& preds,
                          const std::vector<Label>& golds);

struct ModeCell {
  double accuracy = 0.0;
  std::size_t n = 0;
  std::size_t correct = 0;
};

struct ResultRow {
  std::string benchmark;
  std::string model_id;
  Method method = Method::BasicNd;
  double accuracy = 0.0;
  double se = 0.0;
  std::size_t n = 0;
  std::map<std::string, ModeCell> per_mode;  // keyed by mode name
};

ResultRow score_method(const std::string& benchmark, const std::string& model_id,
                       Method method, const std::vector<InstanceRecord>& instances,
                       const std::vector<Prediction>& preds);

nlohmann::json to_json(const ResultRow& row);

// Per-(benchmark, model) mode deltas of each LogT variant against the best
// and the mean baseline, in points with one decimal ("+13.2"). A group
// missing either side raises MissingBaseline.
nlohmann::json per_mode_report(const std::vector<ResultRow>& rows);

struct RunMeta {
  std::string model_id;
  std::map<std::string, std::string> template_hashes;  // template id -> sha256
  std::size_t provider_calls = 0;
  std::size_t cache_hits = 0;
  std::size_t repairs = 0;
  std::map<std::string, int> seeds;  // preset name -> seed
  std::string exemplar_file;
};

RunMeta collect_run_meta(const Gateway& gw, const std::string& exemplar_file = "");

// Writes results.json, results_table.txt, per_mode.csv and run.json into
// out_dir. Byte-deterministic given the same inputs; trace_stats/confusion
// may be null and are then omitted from results.json.
void emit_report(const std::vector<ResultRow>& rows, const nlohmann::json& trace_stats,
                 const nlohmann::json& confusion, const RunMeta& meta,
                 const std::filesystem::path& out_dir);

std::string results_table_text(const std::vector<ResultRow>& rows);

}  // namespace logt
