#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "logt/augment.hpp"
#include "logt/context.hpp"
#include "logt/core.hpp"
#include "logt/errors.hpp"
#include "logt/gateway.hpp"
#include "logt/harness.hpp"
#include "logt/logic/engine.hpp"
#include "logt/reasoner.hpp"
#include "logt/synthesizer.hpp"
#include "logt/trace.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace logt;

namespace {

struct RunConfig {
  ModelConfig model;
  fs::path templates_dir = "templates";
  fs::path cache_dir = ".logt-cache";
  fs::path out_dir = "out";
  fs::path mock_dir = "fixtures/mock";
  fs::path registry_file = "templates/augmentation_registry.json";
  bool mock = false;
  bool strict = false;
  int workers = 4;
  logic::EngineConfig engine;
  KeywordConfig keywords;
  std::vector<std::string> methods = {"logt_full"};
};

void load_config_file(const fs::path& file, RunConfig& rc) {
  std::ifstream in(file);
  if (!in) throw FormatError("cannot read config file: " + file.string());
  json j;
  in >> j;
  if (j.contains("model_id")) rc.model.model_id = j["model_id"].get<std::string>();
  if (j.contains("endpoint")) rc.model.endpoint = j["endpoint"].get<std::string>();
  if (j.contains("api_key_env")) rc.model.api_key_env = j["api_key_env"].get<std::string>();
  if (j.contains("templates_dir")) rc.templates_dir = j["templates_dir"].get<std::string>();
  if (j.contains("cache_dir")) rc.cache_dir = j["cache_dir"].get<std::string>();
  if (j.contains("out_dir")) rc.out_dir = j["out_dir"].get<std::string>();
  if (j.contains("mock_dir")) rc.mock_dir = j["mock_dir"].get<std::string>();
  if (j.contains("registry")) rc.registry_file = j["registry"].get<std::string>();
  if (j.contains("workers")) rc.workers = j["workers"].get<int>();
  if (j.contains("ground_cap")) rc.engine.ground_cap = j["ground_cap"].get<std::size_t>();
  if (j.contains("answer_cap")) rc.engine.answer_cap = j["answer_cap"].get<std::size_t>();
  if (j.contains("methods")) rc.methods = j["methods"].get<std::vector<std::string>>();
  if (j.contains("keywords")) {
    const json& kw = j["keywords"];
    if (kw.contains("negation"))
      rc.keywords.negation = kw["negation"].get<std::vector<std::string>>();
    if (kw.contains("implication"))
      rc.keywords.implication = kw["implication"].get<std::vector<std::string>>();
    if (kw.contains("defeasible"))
      rc.keywords.defeasible = kw["defeasible"].get<std::vector<std::string>>();
  }
}

json config_json(const RunConfig& rc) {
  return json{{"model_id", rc.model.model_id},
              {"endpoint", rc.model.endpoint},
              {"api_key_env", rc.model.api_key_env},
              {"templates_dir", rc.templates_dir.string()},
              {"cache_dir", rc.cache_dir.string()},
              {"out_dir", rc.out_dir.string()},
              {"mock_dir", rc.mock_dir.string()},
              {"registry", rc.registry_file.string()},
              {"mock", rc.mock},
              {"strict", rc.strict},
              {"workers", rc.workers},
              {"ground_cap", rc.engine.ground_cap},
              {"answer_cap", rc.engine.answer_cap},
              {"methods", rc.methods},
              {"keywords", json{{"negation", rc.keywords.negation},
                                {"implication", rc.keywords.implication},
                                {"defeasible", rc.keywords.defeasible}}}};
}

std::unique_ptr<Gateway> make_gateway(const RunConfig& rc) {
  GatewayConfig gc;
  gc.model = rc.model;
  gc.cache_dir = rc.cache_dir;
  std::shared_ptr<Provider> provider;
  if (rc.mock)
    provider = std::make_shared<MockProvider>(rc.mock_dir);
  else
    provider = std::make_shared<HttpProvider>();
  auto templates = std::make_shared<TemplateStore>(rc.templates_dir);
  return std::make_unique<Gateway>(gc, provider, templates);
}

std::string sanitize(const std::string& id) {
  std::string out;
  for (char c : id)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-')
               ? c
               : '_';
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out << content;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Stages 1..depth for every instance; 3 = the full Algorithm 1 pass.
int cmd_pipeline(const RunConfig& rc, const std::string& dataset, const std::string& format,
                 int depth) {
  auto gw = make_gateway(rc);
  LoadReport lrep;
  auto instances = load_dataset(dataset, parse_dataset_format(format), &lrep);
  for (const auto& w : lrep.warnings) std::cerr << "warning: " << w << "\n";

  int failures = 0;
  json result_instances = json::array();
  std::map<std::string, int> label_counts;
  std::string trace_lines;

  for (const auto& inst : instances) {
    fs::path dir = rc.out_dir / sanitize(inst.id);
    fs::create_directories(dir);
    try {
      SymbolicContext csym = run_stage1(inst, *gw);
      write_file(dir / "csym.json", to_json(csym).dump(2) + "\n");
      if (depth < 2) continue;

      LogicContext clog = build_logic_context(csym, *gw, rc.engine);
      write_file(dir / "program_raw.lt", clog.raw_text);
      write_file(dir / "program_corrected.lt", clog.corrected_text);
      write_file(dir / "program_retained.lt", retained_text(clog.program));
      write_file(dir / "answers.json", to_json(clog).dump(2) + "\n");
      if (depth < 3) continue;

      GroundedResult res =
          evaluate_hypothesis({csym, clog, inst.hypothesis}, *gw, ContextMask::Full);
      write_file(dir / "prediction.json",
                 prediction_artifact(res, Method::LogtFull).dump(2) + "\n");

      OrganizedTrace trace = organize_trace(res.raw_trace, *gw, inst.id, Method::LogtFull);
      trace = link_provenance(trace, csym);
      trace_lines += to_json(trace).dump() + "\n";

      ++label_counts[to_string(res.label)];
      result_instances.push_back(json{{"id", inst.id},
                                      {"label", to_string(res.label)},
                                      {"query_fallback", clog.query_fallback},
                                      {"prompt_hash", res.prompt_hash}});
    } catch (const Error& e) {
      ++failures;
      std::cerr << "instance " << inst.id << " failed: " << e.what() << "\n";
      result_instances.push_back(json{{"id", inst.id}, {"error", e.what()}});
    }
  }

  if (depth >= 3) {
    write_file(rc.out_dir / "traces.jsonl", trace_lines);
    json results{{"n", instances.size()},
                 {"failures", failures},
                 {"labels", label_counts},
                 {"instances", result_instances}};
    write_file(rc.out_dir / "results.json", results.dump(2) + "\n");
  }
  return failures > 0 && rc.strict ? 1 : 0;
}

int cmd_augment(const RunConfig& rc, const std::string& dataset, const std::string& format,
                const std::vector<std::string>& only_templates,
                const std::string& scorer_cmd) {
  auto gw = make_gateway(rc);
  auto registry = load_registry(rc.registry_file);
  auto instances = load_dataset(dataset, parse_dataset_format(format));

  std::unique_ptr<SubprocessScorer> scorer;
  if (!scorer_cmd.empty()) scorer = std::make_unique<SubprocessScorer>(scorer_cmd);

  int failures = 0;
  std::string aug_lines, difficulty_lines;
  for (const auto& inst : instances) {
    for (const auto& tmpl : registry) {
      if (!only_templates.empty() &&
          std::find(only_templates.begin(), only_templates.end(), tmpl.template_id) ==
              only_templates.end())
        continue;
      if (inst.gold_label != tmpl.source_label) continue;
      try {
        AugmentedHypothesis aug = augment_instance(inst, tmpl, *gw, rc.keywords);
        aug_lines += augmented_instance_json(inst, aug).dump() + "\n";
        if (scorer) {
          DifficultyReport rep = difficulty_check(inst.scenario, inst.hypothesis,
                                                  inst.scenario, aug.text, *scorer);
          json line = to_json(rep);
          line["parent_id"] = inst.id;
          line["template_id"] = tmpl.template_id;
          difficulty_lines += line.dump() + "\n";
        }
      } catch (const Error& e) {
        ++failures;
        std::cerr << "augment " << inst.id << " / " << tmpl.template_id << ": " << e.what()
                  << "\n";
      }
    }
  }
  write_file(rc.out_dir / "augmented.jsonl", aug_lines);
  if (scorer) write_file(rc.out_dir / "difficulty.jsonl", difficulty_lines);
  return failures > 0 && rc.strict ? 1 : 0;
}

int cmd_evaluate(const RunConfig& rc, const std::string& dataset, const std::string& format,
                 std::vector<std::string> methods, const std::string& exemplar_file,
                 std::string benchmark) {
  auto gw = make_gateway(rc);
  auto instances = load_dataset(dataset, parse_dataset_format(format));
  if (instances.empty()) throw EvaluationFailed("dataset is empty: " + dataset);
  if (methods.empty()) methods = rc.methods;
  if (benchmark.empty()) benchmark = to_string(instances.front().source_benchmark);

  std::vector<InstanceRecord> exemplars;
  if (std::find(methods.begin(), methods.end(), "fs") != methods.end()) {
    if (exemplar_file.empty())
      throw EvaluationFailed("method fs needs --exemplars");
    exemplars =
        select_exemplars(load_dataset(exemplar_file, DatasetFormat::CanonicalJsonl));
  }

  HarnessConfig hc;
  hc.engine = rc.engine;
  hc.workers = rc.workers;

  int unanswered = 0;
  std::vector<ResultRow> rows;
  for (const auto& name : methods) {
    MethodSpec spec;
    spec.method = parse_method(name);
    spec.few_shot_examples = exemplars;
    auto preds = run_method(spec, instances, *gw, hc);

    std::string lines;
    for (const auto& p : preds) {
      lines += to_json(p).dump() + "\n";
      if (!p.answered) ++unanswered;
    }
    write_file(rc.out_dir / ("predictions_" + name + ".jsonl"), lines);
    rows.push_back(score_method(benchmark, rc.model.model_id, spec.method, instances, preds));
  }

  emit_report(rows, json(), json(), collect_run_meta(*gw, exemplar_file), rc.out_dir);
  return unanswered > 0 && rc.strict ? 1 : 0;
}

int cmd_report(const RunConfig& rc, const std::string& results_file) {
  json j = json::parse(slurp(results_file));
  if (!j.contains("rows") || !j["rows"].is_array())
    throw FormatError(results_file + " has no rows array");

  std::vector<ResultRow> rows;
  for (const json& rj : j["rows"]) {
    ResultRow row;
    row.benchmark = rj.at("benchmark").get<std::string>();
    row.model_id = rj.at("model_id").get<std::string>();
    row.method = parse_method(rj.at("method").get<std::string>());
    row.accuracy = rj.at("accuracy").get<double>();
    row.se = rj.at("stderr").get<double>();
    row.n = rj.at("n").get<std::size_t>();
    for (auto it = rj.at("per_mode").begin(); it != rj.at("per_mode").end(); ++it) {
      ModeCell cell;
      cell.n = it.value().at("n").get<std::size_t>();
      cell.correct = it.value().at("correct").get<std::size_t>();
      cell.accuracy = cell.n ? static_cast<double>(cell.correct) / cell.n : 0.0;
      row.per_mode[it.key()] = cell;
    }
    rows.push_back(row);
  }

  std::cout << results_table_text(rows);
  try {
    write_file(rc.out_dir / "per_mode_deltas.json", per_mode_report(rows).dump(2) + "\n");
  } catch (const MissingBaseline& e) {
    std::cerr << "per-mode deltas skipped: " << e.what() << "\n";
  }
  return 0;
}

void print_conclusions(const logic::ConclusionSet& c) {
  std::cout << "+D (strict):\n";
  for (const auto& l : c.strict) std::cout << "  " << logic::to_text(l) << "\n";
  std::cout << "+d (defeasible):\n";
  for (const auto& l : c.defeasible) std::cout << "  " << logic::to_text(l) << "\n";
  std::cout << "-d (refuted):\n";
  for (const auto& l : c.refuted) std::cout << "  " << logic::to_text(l) << "\n";
  for (const auto& msg : c.contradictions)
    std::cout << "contradiction: " << msg << "\n";
}

void print_answers(const logic::AnswerSet& ans) {
  if (ans.query.empty()) return;
  bool ground = true;
  for (const auto& b : ans.bindings)
    if (!b.empty()) ground = false;
  if (ans.bindings.empty()) {
    std::cout << "no\n";
    return;
  }
  if (ground && ans.bindings.size() == 1 && ans.bindings[0].empty()) {
    std::cout << "yes\n";
    return;
  }
  for (const auto& binding : ans.bindings) {
    std::string line;
    for (const auto& [var, term] : binding) {
      if (!line.empty()) line += ", ";
      line += "?" + var + " = " + logic::to_text(term);
    }
    std::cout << line << "\n";
  }
  if (ans.truncated) std::cout << "(and more)\n";
}

int cmd_engine_run(const RunConfig& rc, const std::string& file, const std::string& query) {
  logic::Engine engine(rc.engine);
  std::string corrected = logic::correct_syntax(slurp(file)).text;
  logic::LogicProgram program = logic::parse_program(corrected);
  logic::CompiledProgram compiled = logic::compile_filter(program);
  for (const auto& drop : compiled.dropped)
    std::cerr << "dropped: " << logic::to_text(drop.statement) << "  (" << drop.reason
              << ")\n";

  if (!query.empty()) {
    print_answers(engine.answer(compiled, logic::parse_query_text(query)));
    return 0;
  }

  print_conclusions(engine.run(compiled));
  for (const auto& stmt : compiled.retained)
    if (stmt.kind == logic::StatementKind::Query) {
      std::cout << logic::to_text(stmt) << "\n";
      print_answers(engine.answer(compiled, stmt));
    }
  return 0;
}

int cmd_engine_repl(const RunConfig& rc) {
  logic::Engine engine(rc.engine);
  std::string buffer;
  std::string line;
  std::cout << "logt engine repl. Statements accumulate; '?- q(?X).' queries; :reset, :show, "
               ":quit.\n";
  while (std::cout << "logt> " << std::flush, std::getline(std::cin, line)) {
    if (line == ":quit" || line == ":q") break;
    if (line == ":reset") {
      buffer.clear();
      continue;
    }
    if (line == ":show") {
      std::cout << buffer;
      continue;
    }
    if (line.empty()) continue;
    try {
      if (line.rfind("?-", 0) == 0) {
        std::string corrected = logic::correct_syntax(buffer).text;
        logic::CompiledProgram compiled =
            logic::compile_filter(logic::parse_program(corrected));
        print_answers(engine.answer(compiled, logic::parse_query_text(line)));
      } else {
        // reject the line early so the buffer stays compilable
        logic::parse_program(logic::correct_syntax(line).text);
        buffer += line + "\n";
      }
    } catch (const std::exception& e) {
      std::cout << "error: " << e.what() << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig rc;

  // The config file seeds the defaults; explicit flags then override it.
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") {
      try {
        load_config_file(argv[i + 1], rc);
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
      }
    }

  CLI::App app{"LogT: defeasible-logic grounded NLI pipeline"};
  app.require_subcommand(1);
  std::string config_file;
  app.add_option("--config", config_file, "JSON config file");
  app.add_option("--model", rc.model.model_id, "model identifier");
  app.add_option("--endpoint", rc.model.endpoint, "completion endpoint URL");
  app.add_option("--api-key-env", rc.model.api_key_env,
                 "name of the environment variable holding the API key");
  app.add_option("--templates", rc.templates_dir, "prompt template directory");
  app.add_option("--cache", rc.cache_dir, "completion cache directory");
  app.add_option("--out", rc.out_dir, "artifact output directory");
  app.add_flag("--mock", rc.mock, "use the scripted mock provider");
  app.add_option("--mock-dir", rc.mock_dir, "mock fixture directory");
  app.add_option("--registry", rc.registry_file, "augmentation registry file");
  app.add_flag("--strict", rc.strict, "exit 1 on any per-instance failure");
  app.add_option("--workers", rc.workers, "worker pool size")->check(CLI::PositiveNumber);
  app.add_option("--ground-cap", rc.engine.ground_cap, "grounding budget");
  app.add_option("--answer-cap", rc.engine.answer_cap, "per-query answer cap");

  std::string dataset, format = "canonical_jsonl";
  auto add_dataset = [&](CLI::App* sub) {
    sub->add_option("--dataset", dataset, "instance file")->required();
    sub->add_option("--format", format, "dataset format");
  };

  CLI::App* augment = app.add_subcommand("augment", "generate mode-targeted hypotheses");
  add_dataset(augment);
  std::vector<std::string> only_templates;
  std::string scorer_cmd;
  augment->add_option("--template", only_templates, "restrict to these template ids");
  augment->add_option("--scorer", scorer_cmd, "external NLI scorer command");

  CLI::App* context = app.add_subcommand("context", "stage 1: symbolic context only");
  add_dataset(context);
  CLI::App* synthesize = app.add_subcommand("synthesize", "stages 1-2: compile the program");
  add_dataset(synthesize);
  CLI::App* reason = app.add_subcommand("reason", "full pipeline with grounded prediction");
  add_dataset(reason);

  CLI::App* evaluate = app.add_subcommand("evaluate", "run methods over a dataset");
  add_dataset(evaluate);
  std::vector<std::string> methods;
  std::string exemplar_file, benchmark;
  evaluate->add_option("--method", methods, "method name (repeatable)");
  evaluate->add_option("--exemplars", exemplar_file, "canonical JSONL exemplar file");
  evaluate->add_option("--benchmark", benchmark, "benchmark name for the report");

  CLI::App* report = app.add_subcommand("report", "re-render tables from results.json");
  std::string results_file;
  report->add_option("--results", results_file, "results.json from evaluate")->required();

  CLI::App* engine = app.add_subcommand("engine", "defeasible engine tools");
  engine->require_subcommand(1);
  CLI::App* engine_run = engine->add_subcommand("run", "compile and solve a program file");
  std::string program_file, query;
  engine_run->add_option("file", program_file, "program text")->required();
  engine_run->add_option("--query", query, "query to answer instead of solving");
  CLI::App* engine_repl = engine->add_subcommand("repl", "interactive engine session");

  CLI::App* config = app.add_subcommand("config", "configuration");
  CLI::App* config_show = config->add_subcommand("show", "print the effective settings");
  config->require_subcommand(1);

  // Global options may trail the subcommand (logt evaluate ... --mock).
  for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
    sub->fallthrough();
    for (CLI::App* nested : sub->get_subcommands([](const CLI::App*) { return true; }))
      nested->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (*augment) return cmd_augment(rc, dataset, format, only_templates, scorer_cmd);
    if (*context) return cmd_pipeline(rc, dataset, format, 1);
    if (*synthesize) return cmd_pipeline(rc, dataset, format, 2);
    if (*reason) return cmd_pipeline(rc, dataset, format, 3);
    if (*evaluate) return cmd_evaluate(rc, dataset, format, methods, exemplar_file, benchmark);
    if (*report) return cmd_report(rc, results_file);
    if (*engine_run) return cmd_engine_run(rc, program_file, query);
    if (*engine_repl) return cmd_engine_repl(rc);
    if (*config_show) {
      std::cout << config_json(rc).dump(2) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
