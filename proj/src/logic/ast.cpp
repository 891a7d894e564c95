#include "logt/logic/ast.hpp"

#include <algorithm>
#include <sstream>

namespace logt::logic {

Term make_const(std::string s) { return Term{TermKind::Constant, std::move(s)}; }
Term make_int(long long v) { return Term{TermKind::Integer, std::to_string(v)}; }
Term make_var(std::string name) { return Term{TermKind::Variable, std::move(name)}; }

bool Literal::is_ground() const {
  return std::none_of(args.begin(), args.end(), [](const Term& t) { return t.is_var(); });
}

Literal Literal::complement() const {
  Literal c = *this;
  c.negated = !c.negated;
  return c;
}

std::set<std::string> Statement::variables() const {
  std::set<std::string> vars;
  auto scan = [&vars](const Literal& l) {
    for (const Term& t : l.args)
      if (t.is_var()) vars.insert(t.text);
  };
  if (head) scan(*head);
  for (const BodyLiteral& b : body) scan(b.lit);
  return vars;
}

namespace {

bool needs_quotes(const std::string& s) {
  if (s.empty()) return true;
  if (!std::islower(static_cast<unsigned char>(s[0]))) return true;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return true;
  return false;
}

void render_body(std::ostringstream& out, const std::vector<BodyLiteral>& body) {
  for (size_t i = 0; i < body.size(); ++i) {
    if (i) out << ", ";
    out << to_text(body[i]);
  }
}

}  // namespace

std::string to_text(const Term& t) {
  switch (t.kind) {
    case TermKind::Variable: return "?" + t.text;
    case TermKind::Integer: return t.text;
    case TermKind::Constant: return needs_quotes(t.text) ? "'" + t.text + "'" : t.text;
  }
  return t.text;
}

std::string to_text(const Literal& l) {
  std::ostringstream out;
  if (l.negated) out << "\\neg ";
  out << l.predicate;
  if (!l.args.empty()) {
    out << "(";
    for (size_t i = 0; i < l.args.size(); ++i) {
      if (i) out << ", ";
      out << to_text(l.args[i]);
    }
    out << ")";
  }
  return out.str();
}

std::string to_text(const BodyLiteral& b) {
  return b.naf ? "\\naf " + to_text(b.lit) : to_text(b.lit);
}

std::string to_text(const Statement& s) {
  std::ostringstream out;
  switch (s.kind) {
    case StatementKind::Fact:
      out << to_text(*s.head) << ".";
      break;
    case StatementKind::StrictRule:
      out << to_text(*s.head);
      if (!s.body.empty()) {
        out << " :- ";
        render_body(out, s.body);
      }
      out << ".";
      break;
    case StatementKind::DefeasibleRule:
      out << "@{" << *s.label << "} " << to_text(*s.head);
      if (!s.body.empty()) {
        out << " :- ";
        render_body(out, s.body);
      }
      out << ".";
      break;
    case StatementKind::Override:
      out << "\\overrides(" << s.override_pair->first << ", " << s.override_pair->second << ").";
      break;
    case StatementKind::Query:
      out << "?- ";
      render_body(out, s.body);
      out << ".";
      break;
  }
  return out.str();
}

std::string to_text(const std::vector<Statement>& statements) {
  std::ostringstream out;
  for (const Statement& s : statements) out << to_text(s) << "\n";
  return out.str();
}

std::string to_text(const LogicProgram& p) { return to_text(p.statements); }

}  // namespace logt::logic
