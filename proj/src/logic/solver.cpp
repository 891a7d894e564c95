#include "logt/logic/solver.hpp"

#include <algorithm>

namespace logt::logic {

namespace {

// Literal key: 2 * atom id + (negated ? 1 : 0).
struct GroundRule {
  bool strict = false;
  int head = -1;
  std::vector<int> pos;
  std::vector<int> naf;
  int label = -1;
};

struct Workspace {
  std::vector<Literal> atoms;                 // id -> positive literal
  std::map<Literal, int> atom_ids;
  std::vector<GroundRule> rules;
  std::vector<std::vector<int>> rules_for;    // key -> rule indices
  std::vector<int> stratum;                   // key -> stratum
  std::set<std::pair<int, int>> declared;     // (winner label, loser label)
  std::map<std::string, int> label_ids;

  std::vector<char> strict_in, def_in, def_out;

  int atom(const Literal& l) {
    Literal pos = l;
    pos.negated = false;
    auto [it, fresh] = atom_ids.emplace(pos, static_cast<int>(atoms.size()));
    if (fresh) atoms.push_back(pos);
    return it->second;
  }
  int key(const Literal& l) { return 2 * atom(l) + (l.negated ? 1 : 0); }
  static int flip(int k) { return k ^ 1; }

  bool overrides(const GroundRule& t, const GroundRule& s) const {
    if (t.strict && !s.strict) return true;
    if (t.strict || s.strict) return false;
    return t.label >= 0 && s.label >= 0 && declared.count({t.label, s.label}) > 0;
  }
  bool firable(const GroundRule& r) const {
    for (int p : r.pos)
      if (!def_in[p]) return false;
    for (int b : r.naf)
      if (!def_out[b]) return false;
    return true;
  }
  bool failed(const GroundRule& r) const {
    for (int p : r.pos)
      if (def_out[p]) return true;
    for (int b : r.naf)
      if (def_in[b]) return true;
    return false;
  }
};

}  // namespace

ConclusionSet solve(const std::vector<Statement>& ground_statements,
                    const std::map<std::string, int>& strata) {
  Workspace w;

  for (const Statement& s : ground_statements) {
    switch (s.kind) {
      case StatementKind::Query:
        continue;
      case StatementKind::Override: {
        auto id = [&w](const std::string& name) {
          auto [it, fresh] = w.label_ids.emplace(name, static_cast<int>(w.label_ids.size()));
          return it->second;
        };
        w.declared.insert({id(s.override_pair->first), id(s.override_pair->second)});
        continue;
      }
      case StatementKind::Fact:
      case StatementKind::StrictRule:
      case StatementKind::DefeasibleRule:
        break;
    }
    GroundRule r;
    r.strict = s.kind != StatementKind::DefeasibleRule;
    r.head = w.key(*s.head);
    for (const auto& b : s.body)
      (b.naf ? r.naf : r.pos).push_back(w.key(b.lit));
    if (s.label) {
      auto [it, fresh] = w.label_ids.emplace(*s.label, static_cast<int>(w.label_ids.size()));
      r.label = it->second;
    }
    w.rules.push_back(std::move(r));
  }

  const int nkeys = static_cast<int>(w.atoms.size()) * 2;
  w.rules_for.assign(nkeys, {});
  for (size_t i = 0; i < w.rules.size(); ++i) w.rules_for[w.rules[i].head].push_back(static_cast<int>(i));
  w.stratum.assign(nkeys, 0);
  int max_stratum = 0;
  for (int k = 0; k < nkeys; ++k) {
    auto it = strata.find(w.atoms[k / 2].predicate);
    w.stratum[k] = it == strata.end() ? 0 : it->second;
    max_stratum = std::max(max_stratum, w.stratum[k]);
  }
  w.strict_in.assign(nkeys, 0);
  w.def_in.assign(nkeys, 0);
  w.def_out.assign(nkeys, 0);

  for (int level = 0; level <= max_stratum; ++level) {
    // Strict layer.
    for (bool changed = true; changed;) {
      changed = false;
      for (const GroundRule& r : w.rules) {
        if (!r.strict || w.strict_in[r.head] || w.stratum[r.head] != level) continue;
        bool sat = true;
        for (int p : r.pos)
          if (!w.strict_in[p]) {
            sat = false;
            break;
          }
        if (sat)
          for (int b : r.naf)
            if (!w.def_out[b]) {
              sat = false;
              break;
            }
        if (sat) {
          w.strict_in[r.head] = 1;
          changed = true;
        }
      }
    }

    std::vector<int> level_keys;
    for (int k = 0; k < nkeys; ++k)
      if (w.stratum[k] == level) level_keys.push_back(k);

    auto discarded = [&w](int target, const GroundRule& attacker) {
      if (w.failed(attacker)) return true;
      for (int ti : w.rules_for[target]) {
        const GroundRule& t = w.rules[ti];
        if (w.overrides(t, attacker) && w.firable(t)) return true;
      }
      return false;
    };

    auto derive = [&]() {
      bool any = false;
      for (bool changed = true; changed;) {
        changed = false;
        for (int k : level_keys) {
          int c = Workspace::flip(k);
          if (!w.def_in[k]) {
            bool in = false;
            if (w.strict_in[k]) {
              in = true;
            } else if (!w.strict_in[c]) {
              bool fire = false;
              for (int ri : w.rules_for[k])
                if (w.firable(w.rules[ri])) {
                  fire = true;
                  break;
                }
              if (fire) {
                in = true;
                for (int si : w.rules_for[c])
                  if (!discarded(k, w.rules[si])) {
                    in = false;
                    break;
                  }
              }
            }
            if (in) {
              w.def_in[k] = 1;
              changed = any = true;
            }
          }
          if (!w.def_out[k] && !w.strict_in[k]) {
            bool out = w.strict_in[c];
            if (!out) {
              out = true;
              for (int ri : w.rules_for[k])
                if (!w.failed(w.rules[ri])) {
                  out = false;
                  break;
                }
            }
            if (!out) {
              for (int si : w.rules_for[c]) {
                const GroundRule& s = w.rules[si];
                if (!w.firable(s)) continue;
                bool resisted = false;
                for (int ti : w.rules_for[k]) {
                  const GroundRule& t = w.rules[ti];
                  if (w.overrides(t, s) && !w.failed(t)) {
                    resisted = true;
                    break;
                  }
                }
                if (!resisted) {
                  out = true;
                  break;
                }
              }
            }
            if (out) {
              w.def_out[k] = 1;
              changed = any = true;
            }
          }
        }
      }
      return any;
    };

    // Greatest unfounded subset of the still-undecided literals: every rule
    // for a member is failed or leans on another member.
    auto unfounded = [&]() {
      std::set<int> u;
      for (int k : level_keys)
        if (!w.def_in[k] && !w.def_out[k]) u.insert(k);
      for (bool changed = true; changed && !u.empty();) {
        changed = false;
        for (auto it = u.begin(); it != u.end();) {
          bool supported = false;
          for (int ri : w.rules_for[*it]) {
            const GroundRule& r = w.rules[ri];
            if (w.failed(r)) continue;
            bool leans = false;
            for (int p : r.pos)
              if (u.count(p)) {
                leans = true;
                break;
              }
            if (!leans) {
              supported = true;
              break;
            }
          }
          if (supported) {
            it = u.erase(it);
            changed = true;
          } else {
            ++it;
          }
        }
      }
      return u;
    };

    for (;;) {
      derive();
      std::set<int> u = unfounded();
      if (u.empty()) break;
      for (int k : u) w.def_out[k] = 1;
    }
    // Attack deadlock: whatever survives both phases is unprovable.
    for (int k : level_keys)
      if (!w.def_in[k] && !w.def_out[k]) w.def_out[k] = 1;
  }

  ConclusionSet res;
  for (int k = 0; k < nkeys; ++k) {
    Literal l = w.atoms[k / 2];
    l.negated = k % 2 == 1;
    if (w.strict_in[k]) res.strict.insert(l);
    if (w.def_in[k]) res.defeasible.insert(l);
    if (w.def_out[k]) res.refuted.insert(l);
  }
  for (size_t a = 0; a < w.atoms.size(); ++a)
    if (w.strict_in[2 * a] && w.strict_in[2 * a + 1])
      res.contradictions.push_back(to_text(w.atoms[a]));
  std::sort(res.contradictions.begin(), res.contradictions.end());
  return res;
}

}  // namespace logt::logic
