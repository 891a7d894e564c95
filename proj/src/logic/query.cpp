#include "logt/logic/query.hpp"

#include <algorithm>

#include "logt/errors.hpp"
#include "logt/logic/grounder.hpp"
#include "logt/logic/parser.hpp"
#include "logt/logic/solver.hpp"

namespace logt::logic {

Statement parse_query_text(const std::string& text) {
  LogicProgram p = parse_program(text);
  if (!p.diagnostics.empty())
    throw QueryCompileError("query does not parse: " + p.diagnostics.front().message);
  if (p.statements.size() != 1 || p.statements.front().kind != StatementKind::Query)
    throw QueryCompileError("expected exactly one query statement");
  return p.statements.front();
}

void compile_query(const CompiledProgram& compiled, const Statement& query) {
  if (query.kind != StatementKind::Query || query.body.empty())
    throw QueryCompileError("not a query statement");
  std::set<std::string> bound;
  for (const auto& b : query.body)
    if (!b.naf)
      for (const Term& t : b.lit.args)
        if (t.is_var()) bound.insert(t.text);
  for (const auto& b : query.body) {
    for (const Term& t : b.lit.args)
      if (t.is_var() && !bound.count(t.text))
        throw QueryCompileError("unsafe query variable ?" + t.text);
    auto it = compiled.predicate_table.find(b.lit.predicate);
    if (it != compiled.predicate_table.end() && it->second != b.lit.args.size())
      throw QueryCompileError("arity mismatch: query uses " + b.lit.predicate + "/" +
                              std::to_string(b.lit.args.size()) + " but program established " +
                              b.lit.predicate + "/" + std::to_string(it->second));
  }
}

AnswerSet answer_query(const CompiledProgram& compiled, const Statement& query,
                       const QueryLimits& limits) {
  compile_query(compiled, query);

  AnswerSet res;
  res.query = query.body;

  std::vector<Term> extra;
  for (const auto& b : query.body)
    for (const Term& t : b.lit.args)
      if (!t.is_var()) extra.push_back(t);

  std::vector<Statement> grounded = ground(compiled, extra, limits.ground_cap);
  ConclusionSet concl = solve(grounded, compiled.strata);

  std::set<std::string> var_set;
  for (const auto& b : query.body)
    for (const Term& t : b.lit.args)
      if (t.is_var()) var_set.insert(t.text);
  std::vector<std::string> vars(var_set.begin(), var_set.end());

  std::set<Term> universe_set;
  for (const Statement& s : grounded) {
    auto scan = [&](const Literal& l) {
      for (const Term& t : l.args) universe_set.insert(t);
    };
    if (s.head) scan(*s.head);
    for (const auto& b : s.body) scan(b.lit);
  }
  for (const Term& t : extra) universe_set.insert(t);
  std::vector<Term> universe(universe_set.begin(), universe_set.end());

  auto holds = [&](const Binding& bind) {
    for (const auto& b : query.body) {
      Literal l = b.lit;
      for (Term& t : l.args)
        if (t.is_var()) t = bind.at(t.text);
      if (!b.naf && !concl.defeasible.count(l)) return false;
      if (b.naf && !concl.refuted.count(l)) return false;
    }
    return true;
  };

  if (vars.empty()) {
    if (holds({})) res.bindings.push_back({});
    return res;
  }
  if (universe.empty()) return res;

  std::vector<size_t> odo(vars.size(), 0);
  for (;;) {
    Binding bind;
    for (size_t i = 0; i < vars.size(); ++i) bind[vars[i]] = universe[odo[i]];
    if (holds(bind)) {
      if (res.bindings.size() == limits.answer_cap) {
        res.truncated = true;
        break;
      }
      res.bindings.push_back(std::move(bind));
    }
    size_t i = vars.size();
    bool done = false;
    while (i > 0) {
      --i;
      if (++odo[i] < universe.size()) break;
      odo[i] = 0;
      if (i == 0) done = true;
    }
    if (done) break;
  }
  return res;
}

}  // namespace logt::logic
