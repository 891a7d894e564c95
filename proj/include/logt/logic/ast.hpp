#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace logt::logic {

enum class TermKind { Constant, Integer, Variable };

// A term is a constant symbol (lowercase identifier or quoted string), an
// integer, or a variable. Variables are stored without the leading '?'.
struct Term {
  TermKind kind = TermKind::Constant;
  std::string text;

  bool is_var() const { return kind == TermKind::Variable; }
  auto operator<=>(const Term&) const = default;
};

Term make_const(std::string s);
Term make_int(long long v);
Term make_var(std::string name);

// A classical literal: optionally \neg-negated atom.
struct Literal {
  bool negated = false;
  std::string predicate;
  std::vector<Term> args;

  bool is_ground() const;
  Literal complement() const;
  auto operator<=>(const Literal&) const = default;
};

// A body conjunct: a literal, possibly under negation-as-failure.
struct BodyLiteral {
  bool naf = false;
  Literal lit;

  auto operator<=>(const BodyLiteral&) const = default;
};

enum class StatementKind { Fact, StrictRule, DefeasibleRule, Override, Query };

struct Statement {
  StatementKind kind = StatementKind::Fact;
  std::optional<std::string> label;   // present iff DefeasibleRule
  std::optional<Literal> head;        // Fact, StrictRule, DefeasibleRule
  std::vector<BodyLiteral> body;      // rules and queries
  std::optional<std::pair<std::string, std::string>> override_pair;  // Override
  int source_line = 0;                // 1-based line in the source text

  bool is_rule() const {
    return kind == StatementKind::StrictRule || kind == StatementKind::DefeasibleRule;
  }
  std::set<std::string> variables() const;
};

struct Diagnostic {
  int line = 0;
  std::string message;
};

// Output of the parser: statements in source order plus parse diagnostics.
// A program with diagnostics still carries every statement that did parse.
struct LogicProgram {
  std::vector<Statement> statements;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return diagnostics.empty(); }
};

struct DropInfo {
  Statement statement;
  std::string reason;
};

// Output of compile_filter: the retained statements in admission order, the
// dropped ones with reasons, the predicate arity table, and the stratum of
// each predicate (0-based, lower strata evaluated first).
struct CompiledProgram {
  std::vector<Statement> retained;
  std::vector<DropInfo> dropped;
  std::map<std::string, size_t> predicate_table;   // predicate -> arity
  std::map<std::string, int> strata;               // predicate -> stratum
};

// Output of solve. All literals are ground.
//   strict:      +Delta, provable from facts and strict rules alone
//   defeasible:  +partial, defeasibly provable (includes strict)
//   refuted:     -partial, demonstrably not defeasibly provable
// contradictions lists atoms strictly provable in both polarities.
struct ConclusionSet {
  std::set<Literal> strict;
  std::set<Literal> defeasible;
  std::set<Literal> refuted;
  std::vector<std::string> contradictions;

  bool holds(const Literal& l) const { return defeasible.count(l) > 0; }
};

using Binding = std::map<std::string, Term>;

struct AnswerSet {
  std::vector<BodyLiteral> query;
  std::vector<Binding> bindings;   // lexicographic by (var name, term) order
  bool truncated = false;          // hit the answer cap
};

// Renderers produce the canonical program text form, parseable back.
std::string to_text(const Term& t);
std::string to_text(const Literal& l);
std::string to_text(const BodyLiteral& b);
std::string to_text(const Statement& s);
std::string to_text(const LogicProgram& p);
std::string to_text(const std::vector<Statement>& statements);

}  // namespace logt::logic
