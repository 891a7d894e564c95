#include "logt/logic/compiler.hpp"

#include <algorithm>
#include <functional>

namespace logt::logic {

namespace {

struct DepEdge {
  std::string head;  // depends on
  std::string body;
  bool naf;
};

// Kosaraju condensation over the predicate dependency graph.
struct Condensation {
  std::map<std::string, int> comp;
  int count = 0;
};

Condensation condense(const std::set<std::string>& nodes, const std::vector<DepEdge>& edges) {
  std::map<std::string, std::vector<std::string>> adj, radj;
  for (const auto& n : nodes) {
    adj[n];
    radj[n];
  }
  for (const auto& e : edges) {
    adj[e.head].push_back(e.body);
    radj[e.body].push_back(e.head);
  }
  std::vector<std::string> order;
  std::set<std::string> seen;
  std::function<void(const std::string&)> dfs1 = [&](const std::string& n) {
    seen.insert(n);
    for (const auto& m : adj[n])
      if (!seen.count(m)) dfs1(m);
    order.push_back(n);
  };
  for (const auto& n : nodes)
    if (!seen.count(n)) dfs1(n);

  Condensation c;
  std::function<void(const std::string&, int)> dfs2 = [&](const std::string& n, int id) {
    c.comp[n] = id;
    for (const auto& m : radj[n])
      if (!c.comp.count(m)) dfs2(m, id);
  };
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if (!c.comp.count(*it)) dfs2(*it, c.count++);
  return c;
}

bool naf_stratifiable(const std::set<std::string>& nodes, const std::vector<DepEdge>& edges) {
  Condensation c = condense(nodes, edges);
  for (const auto& e : edges)
    if (e.naf && c.comp[e.head] == c.comp[e.body]) return false;
  return true;
}

bool overrides_acyclic(const std::vector<std::pair<std::string, std::string>>& pairs) {
  std::map<std::string, std::vector<std::string>> adj;
  std::set<std::string> nodes;
  for (const auto& [w, l] : pairs) {
    adj[w].push_back(l);
    nodes.insert(w);
    nodes.insert(l);
  }
  std::map<std::string, int> state;  // 0 new, 1 open, 2 done
  std::function<bool(const std::string&)> dfs = [&](const std::string& n) {
    state[n] = 1;
    for (const auto& m : adj[n]) {
      if (state[m] == 1) return false;
      if (state[m] == 0 && !dfs(m)) return false;
    }
    state[n] = 2;
    return true;
  };
  for (const auto& n : nodes)
    if (state[n] == 0 && !dfs(n)) return false;
  return true;
}

std::vector<const Literal*> statement_literals(const Statement& s) {
  std::vector<const Literal*> lits;
  if (s.head) lits.push_back(&*s.head);
  for (const auto& b : s.body) lits.push_back(&b.lit);
  return lits;
}

// Safety: every variable in the head or under \naf must be bound by a
// positive non-naf body literal.
bool unsafe_variable(const Statement& s, std::string* var) {
  std::set<std::string> bound;
  for (const auto& b : s.body)
    if (!b.naf)
      for (const Term& t : b.lit.args)
        if (t.is_var()) bound.insert(t.text);
  auto check = [&](const Literal& l) {
    for (const Term& t : l.args)
      if (t.is_var() && !bound.count(t.text)) {
        *var = t.text;
        return true;
      }
    return false;
  };
  if (s.head && check(*s.head)) return true;
  for (const auto& b : s.body)
    if (b.naf && check(b.lit)) return true;
  return false;
}

}  // namespace

CompiledProgram compile_filter(const LogicProgram& program) {
  CompiledProgram out;
  std::vector<std::pair<std::string, std::string>> override_pairs;
  std::vector<DepEdge> dep_edges;
  std::set<std::string> predicates;

  auto drop = [&](const Statement& s, std::string reason) {
    out.dropped.push_back({s, std::move(reason)});
  };

  for (const Statement& s : program.statements) {
    switch (s.kind) {
      case StatementKind::Query:
        drop(s, "query: compiled separately, not part of the program");
        continue;
      case StatementKind::Override: {
        if (!s.override_pair) {
          drop(s, "malformed override");
          continue;
        }
        auto cand = override_pairs;
        cand.push_back(*s.override_pair);
        if (!overrides_acyclic(cand)) {
          drop(s, "override cycle through '" + s.override_pair->first + "'");
          continue;
        }
        override_pairs = std::move(cand);
        out.retained.push_back(s);
        continue;
      }
      case StatementKind::Fact:
      case StatementKind::StrictRule:
      case StatementKind::DefeasibleRule:
        break;
    }
    if (!s.head || (s.kind == StatementKind::DefeasibleRule && !s.label)) {
      drop(s, "malformed statement");
      continue;
    }

    std::string var;
    if (unsafe_variable(s, &var)) {
      drop(s, "unsafe variable ?" + var);
      continue;
    }

    // Arity consistency, first statement wins.
    auto table = out.predicate_table;
    bool conflict = false;
    for (const Literal* l : statement_literals(s)) {
      auto [it, fresh] = table.emplace(l->predicate, l->args.size());
      if (!fresh && it->second != l->args.size()) {
        drop(s, "arity conflict: " + l->predicate + "/" + std::to_string(l->args.size()) +
                    " vs established " + l->predicate + "/" + std::to_string(it->second));
        conflict = true;
        break;
      }
    }
    if (conflict) continue;

    if (!s.body.empty()) {
      auto nodes = predicates;
      auto edges = dep_edges;
      for (const Literal* l : statement_literals(s)) nodes.insert(l->predicate);
      for (const auto& b : s.body) edges.push_back({s.head->predicate, b.lit.predicate, b.naf});
      if (!naf_stratifiable(nodes, edges)) {
        drop(s, "negation cycle through predicate '" + s.head->predicate + "'");
        continue;
      }
      dep_edges = std::move(edges);
    }
    for (const Literal* l : statement_literals(s)) predicates.insert(l->predicate);
    out.predicate_table = std::move(table);
    out.retained.push_back(s);
  }

  // Final strata: positive dependencies share a stratum floor, naf
  // dependencies force a strictly higher stratum. Longest path over the
  // condensation.
  for (const auto& [p, a] : out.predicate_table) predicates.insert(p);
  Condensation c = condense(predicates, dep_edges);
  std::map<int, std::map<int, int>> weight;  // comp -> dep comp -> 0/1
  for (const auto& e : dep_edges) {
    int from = c.comp[e.head], to = c.comp[e.body];
    if (from == to) continue;
    int w = e.naf ? 1 : 0;
    auto& slot = weight[from][to];
    slot = std::max(slot, w);
  }
  std::map<int, int> level;
  std::function<int(int)> depth = [&](int comp) {
    auto it = level.find(comp);
    if (it != level.end()) return it->second;
    level[comp] = 0;  // settled before recursion; DAG, so no revisits matter
    int best = 0;
    for (const auto& [dep, w] : weight[comp]) best = std::max(best, depth(dep) + w);
    level[comp] = best;
    return best;
  };
  for (const auto& p : predicates) out.strata[p] = depth(c.comp[p]);

  return out;
}

}  // namespace logt::logic
