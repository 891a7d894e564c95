#include "logt/logic/grounder.hpp"

#include <algorithm>

#include "logt/errors.hpp"

namespace logt::logic {

namespace {

void collect_constants(const Statement& s, std::set<Term>* out) {
  auto scan = [out](const Literal& l) {
    for (const Term& t : l.args)
      if (!t.is_var()) out->insert(t);
  };
  if (s.head) scan(*s.head);
  for (const auto& b : s.body) scan(b.lit);
}

std::vector<std::string> variable_order(const Statement& s) {
  std::vector<std::string> order;
  std::set<std::string> seen;
  auto scan = [&](const Literal& l) {
    for (const Term& t : l.args)
      if (t.is_var() && seen.insert(t.text).second) order.push_back(t.text);
  };
  if (s.head) scan(*s.head);
  for (const auto& b : s.body) scan(b.lit);
  return order;
}

Statement substitute(const Statement& s, const std::map<std::string, Term>& sub) {
  Statement g = s;
  auto apply = [&sub](Literal& l) {
    for (Term& t : l.args)
      if (t.is_var()) t = sub.at(t.text);
  };
  if (g.head) apply(*g.head);
  for (auto& b : g.body) apply(b.lit);
  return g;
}

}  // namespace

std::vector<Term> herbrand_universe(const CompiledProgram& compiled) {
  std::set<Term> consts;
  for (const Statement& s : compiled.retained) collect_constants(s, &consts);
  return {consts.begin(), consts.end()};
}

std::vector<Statement> ground(const CompiledProgram& compiled,
                              const std::vector<Term>& extra_constants, size_t cap) {
  std::set<Term> consts;
  for (const Statement& s : compiled.retained) collect_constants(s, &consts);
  for (const Term& t : extra_constants)
    if (!t.is_var()) consts.insert(t);
  std::vector<Term> universe(consts.begin(), consts.end());

  std::vector<Statement> out;
  size_t total = 0;
  auto charge = [&](size_t count) {
    total += count;
    if (total > cap)
      throw GroundingBudgetExceeded("grounding budget exceeded: " + std::to_string(total) +
                                    " instantiations > cap " + std::to_string(cap));
  };

  for (const Statement& s : compiled.retained) {
    std::vector<std::string> vars = variable_order(s);
    if (vars.empty()) {
      charge(1);
      out.push_back(s);
      continue;
    }
    if (universe.empty()) continue;  // no instantiations possible

    size_t count = 1;
    for (size_t i = 0; i < vars.size(); ++i) {
      if (count > cap / universe.size() + 1) {
        count = cap + 1;
        break;
      }
      count *= universe.size();
    }
    charge(count);

    std::vector<size_t> odo(vars.size(), 0);
    for (;;) {
      std::map<std::string, Term> sub;
      for (size_t i = 0; i < vars.size(); ++i) sub[vars[i]] = universe[odo[i]];
      out.push_back(substitute(s, sub));
      size_t i = vars.size();
      while (i > 0) {
        --i;
        if (++odo[i] < universe.size()) break;
        odo[i] = 0;
        if (i == 0) goto next_statement;
      }
    }
  next_statement:;
  }
  return out;
}

}  // namespace logt::logic
