#include "logt/synthesizer.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "logt/errors.hpp"

namespace logt {

using logic::AnswerSet;
using logic::Binding;
using logic::CompiledProgram;
using logic::Statement;
using logic::StatementKind;

static std::string lower_trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  std::string t = s.substr(a, b - a + 1);
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return t;
}

namespace {
struct Sections {
  std::string facts, rules, queries;
  bool any = false;
};
}  // namespace

static Sections split_sections(const std::string& completion) {
  Sections out;
  size_t pos = 0;
  while ((pos = completion.find("```", pos)) != std::string::npos) {
    size_t eol = completion.find('\n', pos + 3);
    if (eol == std::string::npos) break;
    std::string tag = lower_trim(completion.substr(pos + 3, eol - pos - 3));
    size_t close = completion.find("```", eol + 1);
    if (close == std::string::npos) break;
    std::string content = completion.substr(eol + 1, close - eol - 1);
    if (tag == "facts") {
      out.facts += content;
      out.any = true;
    } else if (tag == "rules") {
      out.rules += content;
      out.any = true;
    } else if (tag == "queries") {
      out.queries += content;
      out.any = true;
    }
    pos = close + 3;
  }
  return out;
}

SynthesisBundle synthesize_program(const SymbolicContext& ctx, Gateway& gw) {
  SynthesisBundle bundle;
  std::string bank = gw.render(bundle.syntax_bank_id, {});

  std::ostringstream queries_nl;
  for (size_t i = 0; i < ctx.nl_queries.size(); ++i)
    queries_nl << (i + 1) << ". " << ctx.nl_queries[i] << "\n";

  std::string completion = gw.complete_template("synthesis",
                                                {{"syntax_bank", bank},
                                                 {"ontology", ontology_to_text(ctx.ontology)},
                                                 {"triples", triples_to_text(ctx.triples)},
                                                 {"nl_queries", queries_nl.str()}},
                                                Preset::Prediction);
  Sections s = split_sections(completion);
  if (!s.any) {
    try {
      std::string again = gw.complete_template("synthesis_repair", {{"previous", completion}},
                                               Preset::Prediction);
      s = split_sections(again);
    } catch (const Error& e) {
      throw SynthesisFailed(std::string("section repair call failed: ") + e.what());
    }
    if (!s.any)
      throw SynthesisFailed("no facts/rules/queries section in the synthesis reply");
  }
  bundle.facts_text = s.facts;
  bundle.rules_text = s.rules;
  bundle.queries_text = s.queries;
  return bundle;
}

static std::string query_text(const AnswerSet& a) {
  std::string out = "?- ";
  for (size_t i = 0; i < a.query.size(); ++i) {
    if (i) out += ", ";
    out += logic::to_text(a.query[i]);
  }
  return out + ".";
}

LogicContext compile_bundle(const SynthesisBundle& bundle, const logic::EngineConfig& cfg) {
  LogicContext out;
  out.raw_text = "// facts\n" + bundle.facts_text + "\n// rules\n" + bundle.rules_text +
                 "\n// queries\n" + bundle.queries_text + "\n";

  logic::CorrectionResult corr = logic::correct_syntax(out.raw_text);
  out.corrected_text = corr.text;
  out.fix_log = corr.log;

  logic::LogicProgram parsed = logic::parse_program(corr.text);
  out.program = logic::compile_filter(parsed);

  // Routed queries are not failures; keep only real drops.
  for (const logic::DropInfo& d : out.program.dropped) {
    if (d.statement.kind != StatementKind::Query) out.drop_log.push_back(d);
  }

  size_t compiled = 0;
  for (const Statement& stmt : parsed.statements) {
    if (stmt.kind != StatementKind::Query) continue;
    try {
      logic::compile_query(out.program, stmt);
      ++compiled;
    } catch (const QueryCompileError& e) {
      out.drop_log.push_back({stmt, e.what()});
      continue;
    }
    try {
      out.answers.push_back(
          logic::answer_query(out.program, stmt, {cfg.answer_cap, cfg.ground_cap}));
    } catch (const Error& e) {
      // Budget blowups at answer time; the query compiled, so no fallback.
      out.drop_log.push_back({stmt, std::string("query answering failed: ") + e.what()});
    }
  }
  out.query_fallback = compiled == 0;
  if (out.query_fallback) out.answers.clear();
  return out;
}

LogicContext build_logic_context(const SymbolicContext& ctx, Gateway& gw,
                                 const logic::EngineConfig& cfg) {
  return compile_bundle(synthesize_program(ctx, gw), cfg);
}

std::string retained_text(const CompiledProgram& program) {
  std::string out;
  for (const Statement& s : program.retained) {
    out += logic::to_text(s);
    out += "\n";
  }
  return out;
}

std::string answer_set_text(const AnswerSet& a) {
  std::string rendered;
  if (a.bindings.empty()) {
    rendered = "no";
  } else if (a.bindings[0].empty()) {
    rendered = "yes";
  } else {
    for (size_t i = 0; i < a.bindings.size(); ++i) {
      if (i) rendered += "; ";
      bool first = true;
      for (const auto& [var, term] : a.bindings[i]) {
        if (!first) rendered += ", ";
        first = false;
        rendered += "?" + var + " = " + logic::to_text(term);
      }
    }
  }
  if (a.truncated) rendered += " (and more)";
  return query_text(a) + "  ->  " + rendered;
}

std::string answers_text(const std::vector<AnswerSet>& answers) {
  std::string out;
  for (const AnswerSet& a : answers) out += answer_set_text(a) + "\n";
  return out;
}

nlohmann::json to_json(const LogicContext& ctx) {
  using nlohmann::json;
  json program = json::array();
  for (const Statement& s : ctx.program.retained) program.push_back(logic::to_text(s));

  json answers = json::array();
  for (const AnswerSet& a : ctx.answers) {
    json bindings = json::array();
    for (const Binding& b : a.bindings) {
      json jb = json::object();
      for (const auto& [var, term] : b) jb["?" + var] = logic::to_text(term);
      bindings.push_back(std::move(jb));
    }
    answers.push_back(
        {{"query", query_text(a)}, {"bindings", bindings}, {"truncated", a.truncated}});
  }

  json fixes = json::array();
  for (const logic::FixLogEntry& f : ctx.fix_log)
    fixes.push_back(
        {{"line", f.line}, {"rule", f.rule}, {"before", f.before}, {"after", f.after}});

  json drops = json::array();
  for (const logic::DropInfo& d : ctx.drop_log)
    drops.push_back({{"statement", logic::to_text(d.statement)}, {"reason", d.reason}});

  return {{"program", program},
          {"answers", answers},
          {"query_fallback", ctx.query_fallback},
          {"fix_log", fixes},
          {"drop_log", drops}};
}

}  // namespace logt
