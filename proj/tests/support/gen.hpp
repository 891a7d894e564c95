#pragma once

// Random program generation and corruption shared by the property tests and
// the acceptance suite.

#include <cctype>
#include <random>
#include <string>
#include <vector>

#include "logt/logic/ast.hpp"

namespace logt::testgen {

struct GenConfig {
  int max_preds = 8;
  int max_rules = 12;
  int max_consts = 4;
  int max_overrides = 3;
};

inline logic::Term rand_term(std::mt19937& rng, const std::vector<std::string>& consts,
                             const std::vector<std::string>& vars, bool allow_var) {
  std::uniform_int_distribution<int> coin(0, 99);
  if (allow_var && !vars.empty() && coin(rng) < 45)
    return logic::make_var(vars[rng() % vars.size()]);
  if (coin(rng) < 15) return logic::Term{logic::TermKind::Integer, std::to_string(rng() % 5)};
  return logic::make_const(consts[rng() % consts.size()]);
}

// A small random program over a fixed signature. Statements may be unsafe,
// arity-conflicting, or cyclic; compile_filter is expected to sort that out.
inline std::vector<logic::Statement> random_statements(std::mt19937& rng,
                                                       const GenConfig& cfg = {}) {
  using namespace logic;
  std::uniform_int_distribution<int> coin(0, 99);

  int npreds = 1 + static_cast<int>(rng() % cfg.max_preds);
  int nconsts = 1 + static_cast<int>(rng() % cfg.max_consts);
  std::vector<std::string> preds, consts, vars = {"X", "Y"};
  std::vector<size_t> arity;
  for (int i = 0; i < npreds; ++i) {
    preds.push_back("p" + std::to_string(i));
    arity.push_back(rng() % 3);
  }
  for (int i = 0; i < nconsts; ++i) consts.push_back(std::string(1, static_cast<char>('a' + i)));
  std::vector<std::string> labels = {"r0", "r1", "r2", "r3", "r4", "r5"};

  auto rand_literal = [&](bool allow_var) {
    Literal l;
    l.negated = coin(rng) < 30;
    size_t pi = rng() % preds.size();
    l.predicate = preds[pi];
    for (size_t k = 0; k < arity[pi]; ++k) l.args.push_back(rand_term(rng, consts, vars, allow_var));
    return l;
  };

  std::vector<Statement> out;
  int nstmts = 1 + static_cast<int>(rng() % cfg.max_rules);
  for (int i = 0; i < nstmts; ++i) {
    Statement s;
    int kind = coin(rng);
    if (kind < 30) {
      s.kind = StatementKind::Fact;
      s.head = rand_literal(false);
    } else {
      bool defeasible = kind < 75;
      s.kind = defeasible ? StatementKind::DefeasibleRule : StatementKind::StrictRule;
      if (defeasible) s.label = labels[rng() % labels.size()];
      s.head = rand_literal(true);
      int blen = static_cast<int>(rng() % 4);
      for (int b = 0; b < blen; ++b) {
        BodyLiteral bl;
        bl.naf = coin(rng) < 20;
        bl.lit = rand_literal(true);
        s.body.push_back(bl);
      }
      if (s.body.empty() && !s.head->is_ground() && coin(rng) < 80) {
        // Mostly keep presumptions ground so they survive the safety check.
        for (Term& t : s.head->args)
          if (t.is_var()) t = make_const(consts[rng() % consts.size()]);
      }
    }
    out.push_back(std::move(s));
  }
  int noverrides = static_cast<int>(rng() % (cfg.max_overrides + 1));
  for (int i = 0; i < noverrides; ++i) {
    Statement s;
    s.kind = StatementKind::Override;
    s.override_pair = {labels[rng() % labels.size()], labels[rng() % labels.size()]};
    out.push_back(std::move(s));
  }
  return out;
}

// Deliberate damage for the corrector fuzz: the kinds of mangling a model
// emits. Returns text built from the statements with mutations applied.
inline std::string corrupt_text(std::mt19937& rng, const std::vector<logic::Statement>& stmts) {
  std::uniform_int_distribution<int> coin(0, 99);
  std::vector<std::string> lines;
  if (coin(rng) < 40) lines.push_back("```");
  if (coin(rng) < 50) lines.push_back("Here is the logic program for this scenario:");
  for (const auto& s : stmts) {
    std::string line = logic::to_text(s);
    if (coin(rng) < 35 && !line.empty() && line.back() == '.') line.pop_back();
    if (coin(rng) < 30) {
      size_t q = line.find('?');
      while (q != std::string::npos && q + 1 < line.size()) {
        line.erase(q, 1);
        line[q] = static_cast<char>(std::toupper(static_cast<unsigned char>(line[q])));
        q = line.find('?', q);
      }
    }
    if (coin(rng) < 25) {
      size_t n = line.find("\\neg ");
      if (n != std::string::npos) {
        int pick = coin(rng) % 3;
        if (pick == 0) line.replace(n, 5, "~");
        else if (pick == 1) line.replace(n, 5, "not ");
        // pick == 2 keeps \neg
      }
    }
    if (coin(rng) < 40) {
      size_t o = line.find("\\overrides(");
      if (o != std::string::npos) line.erase(o, 1);
    }
    if (coin(rng) < 20) {
      size_t u = line.find('_');
      if (u != std::string::npos) line[u] = '-';
    }
    if (coin(rng) < 12) {
      size_t p = line.rfind(')');
      if (p != std::string::npos) line.erase(p, 1);
    }
    if (coin(rng) < 10) line = "  " + line;
    lines.push_back(line);
    if (coin(rng) < 10) lines.push_back("The rule above encodes the exception.");
  }
  if (coin(rng) < 40) lines.push_back("```");
  std::string text;
  for (const auto& l : lines) {
    text += l;
    text += '\n';
  }
  return text;
}

}  // namespace logt::testgen
