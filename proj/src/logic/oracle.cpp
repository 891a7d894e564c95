#include "logt/logic/oracle.hpp"

#include <algorithm>

#include "logt/errors.hpp"

namespace logt::logic {

namespace {

// String form: "~pred(arg,arg)" with a leading ~ for classical negation.
std::string repr(const Literal& l) {
  std::string s = l.negated ? "~" : "";
  s += l.predicate;
  if (!l.args.empty()) {
    s += "(";
    for (size_t i = 0; i < l.args.size(); ++i) {
      if (i) s += ",";
      s += l.args[i].text;
    }
    s += ")";
  }
  return s;
}

std::string complement(const std::string& lit) {
  return lit.rfind('~', 0) == 0 ? lit.substr(1) : "~" + lit;
}

std::string pred_of(const std::string& lit) {
  size_t b = lit.rfind('~', 0) == 0 ? 1 : 0;
  size_t e = lit.find('(', b);
  return lit.substr(b, e == std::string::npos ? std::string::npos : e - b);
}

struct Row {
  bool strict = false;
  std::string head;
  std::vector<std::pair<bool, std::string>> body;  // (naf, literal)
  std::string label;
};

struct Tables {
  std::vector<Row> rows;
  std::set<std::pair<std::string, std::string>> wins;  // declared override label pairs
  std::map<std::string, Literal> back;                 // repr -> literal
  std::set<std::string> base;
  std::map<std::string, int> strat;
};

bool firable(const Tables& t, const Row& r, const std::set<std::string>& in,
             const std::set<std::string>& out) {
  for (const auto& [naf, lit] : r.body) {
    if (!naf && !in.count(lit)) return false;
    if (naf && !out.count(lit)) return false;
  }
  return true;
}

bool failed(const Tables& t, const Row& r, const std::set<std::string>& in,
            const std::set<std::string>& out) {
  for (const auto& [naf, lit] : r.body) {
    if (!naf && out.count(lit)) return true;
    if (naf && in.count(lit)) return true;
  }
  return false;
}

bool beats(const Tables& t, const Row& winner, const Row& loser) {
  if (winner.strict && !loser.strict) return true;
  if (winner.strict || loser.strict) return false;
  return !winner.label.empty() && !loser.label.empty() &&
         t.wins.count({winner.label, loser.label}) > 0;
}

}  // namespace

ConclusionSet oracle_solve(const std::vector<Statement>& ground_statements) {
  Tables t;
  std::set<std::string> occurring;

  for (const Statement& s : ground_statements) {
    if (s.kind == StatementKind::Query) continue;
    if (s.kind == StatementKind::Override) {
      t.wins.insert(*s.override_pair);
      continue;
    }
    Row r;
    r.strict = s.kind != StatementKind::DefeasibleRule;
    r.head = repr(*s.head);
    t.back.emplace(r.head, *s.head);
    occurring.insert(r.head);
    for (const auto& b : s.body) {
      std::string lit = repr(b.lit);
      t.back.emplace(lit, b.lit);
      occurring.insert(lit);
      r.body.emplace_back(b.naf, lit);
    }
    if (s.label) r.label = *s.label;
    t.rows.push_back(std::move(r));
  }

  if (occurring.size() > 64)
    throw OracleBudgetExceeded("oracle limited to 64 distinct ground literals, got " +
                               std::to_string(occurring.size()));

  for (const auto& lit : occurring) {
    t.base.insert(lit);
    t.base.insert(complement(lit));
    if (!t.back.count(complement(lit)))
      t.back.emplace(complement(lit), t.back.at(lit).complement());
    t.strat[pred_of(lit)] = 0;
  }

  // Stratum relaxation to the least solution.
  for (bool moved = true; moved;) {
    moved = false;
    for (const Row& r : t.rows)
      for (const auto& [naf, lit] : r.body) {
        int need = t.strat[pred_of(lit)] + (naf ? 1 : 0);
        int& have = t.strat[pred_of(r.head)];
        if (have < need) {
          have = need;
          moved = true;
          if (need > static_cast<int>(t.rows.size()) + 1)
            throw OracleBudgetExceeded("oracle stratum relaxation diverged");
        }
      }
  }

  std::set<std::string> strict_in, in, out;
  std::vector<std::string> order(t.base.begin(), t.base.end());
  int top = 0;
  for (const auto& lit : order) top = std::max(top, t.strat[pred_of(lit)]);

  for (int level = 0; level <= top; ++level) {
    for (bool moved = true; moved;) {
      moved = false;
      for (const Row& r : t.rows) {
        if (!r.strict || t.strat[pred_of(r.head)] != level || strict_in.count(r.head)) continue;
        bool ok = true;
        for (const auto& [naf, lit] : r.body)
          if (naf ? !out.count(lit) : !strict_in.count(lit)) {
            ok = false;
            break;
          }
        if (ok) {
          strict_in.insert(r.head);
          moved = true;
        }
      }
    }

    std::vector<std::string> here;
    for (const auto& lit : order)
      if (t.strat[pred_of(lit)] == level) here.push_back(lit);

    auto undecided = [&](const std::string& lit) { return !in.count(lit) && !out.count(lit); };

    auto step = [&]() {
      bool moved = false;
      for (const auto& lit : here) {
        std::string c = complement(lit);
        if (!in.count(lit)) {
          bool add = strict_in.count(lit) > 0;
          if (!add && !strict_in.count(c)) {
            bool support = false;
            for (const Row& r : t.rows)
              if (r.head == lit && firable(t, r, in, out)) {
                support = true;
                break;
              }
            if (support) {
              add = true;
              for (const Row& s : t.rows) {
                if (s.head != c) continue;
                if (failed(t, s, in, out)) continue;
                bool overridden = false;
                for (const Row& w : t.rows)
                  if (w.head == lit && beats(t, w, s) && firable(t, w, in, out)) {
                    overridden = true;
                    break;
                  }
                if (!overridden) {
                  add = false;
                  break;
                }
              }
            }
          }
          if (add) {
            in.insert(lit);
            moved = true;
          }
        }
        if (!out.count(lit) && !strict_in.count(lit)) {
          bool add = strict_in.count(c) > 0;
          if (!add) {
            add = true;
            for (const Row& r : t.rows)
              if (r.head == lit && !failed(t, r, in, out)) {
                add = false;
                break;
              }
          }
          if (!add) {
            for (const Row& s : t.rows) {
              if (s.head != c || !firable(t, s, in, out)) continue;
              bool saved = false;
              for (const Row& w : t.rows)
                if (w.head == lit && beats(t, w, s) && !failed(t, w, in, out)) {
                  saved = true;
                  break;
                }
              if (!saved) {
                add = true;
                break;
              }
            }
          }
          if (add) {
            out.insert(lit);
            moved = true;
          }
        }
      }
      return moved;
    };

    for (;;) {
      while (step()) {
      }
      // Greatest unfounded set among the undecided.
      std::set<std::string> u;
      for (const auto& lit : here)
        if (undecided(lit)) u.insert(lit);
      for (bool moved = true; moved && !u.empty();) {
        moved = false;
        std::vector<std::string> drop;
        for (const auto& lit : u) {
          for (const Row& r : t.rows) {
            if (r.head != lit || failed(t, r, in, out)) continue;
            bool leans = false;
            for (const auto& [naf, b] : r.body)
              if (!naf && u.count(b)) {
                leans = true;
                break;
              }
            if (!leans) {
              drop.push_back(lit);
              break;
            }
          }
        }
        for (const auto& lit : drop)
          if (u.erase(lit)) moved = true;
      }
      if (u.empty()) break;
      for (const auto& lit : u) out.insert(lit);
    }
    for (const auto& lit : here)
      if (undecided(lit)) out.insert(lit);
  }

  ConclusionSet res;
  for (const auto& lit : t.base) {
    const Literal& l = t.back.at(lit);
    if (strict_in.count(lit)) res.strict.insert(l);
    if (in.count(lit)) res.defeasible.insert(l);
    if (out.count(lit)) res.refuted.insert(l);
  }
  for (const auto& lit : t.base) {
    if (lit.rfind('~', 0) == 0) continue;
    if (strict_in.count(lit) && strict_in.count("~" + lit))
      res.contradictions.push_back(to_text(t.back.at(lit)));
  }
  std::sort(res.contradictions.begin(), res.contradictions.end());
  return res;
}

}  // namespace logt::logic
