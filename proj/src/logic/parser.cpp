#include "logt/logic/parser.hpp"

#include "logt/logic/lexer.hpp"

namespace logt::logic {

namespace {

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  LogicProgram run() {
    LogicProgram prog;
    while (peek().kind != TokenKind::End) {
      if (peek().kind == TokenKind::Dot) {
        prog.diagnostics.push_back({peek().line, "empty statement"});
        advance();
        continue;
      }
      int start_line = peek().line;
      try {
        Statement s = statement();
        s.source_line = start_line;
        prog.statements.push_back(std::move(s));
      } catch (const SyntaxError& e) {
        prog.diagnostics.push_back({start_line, e.message});
        resync();
      }
    }
    return prog;
  }

 private:
  struct SyntaxError {
    std::string message;
  };

  const Token& peek() const { return toks_[pos_]; }
  const Token& advance() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& msg) { throw SyntaxError{msg}; }

  void resync() {
    while (peek().kind != TokenKind::End) {
      if (advance().kind == TokenKind::Dot) return;
    }
  }

  void expect(TokenKind k, const char* what) {
    if (peek().kind != k) fail(std::string("expected ") + what + describe_here());
    advance();
  }

  std::string describe_here() const {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::End: return " at end of input";
      case TokenKind::Error: return ", " + t.text;
      case TokenKind::UIdent: return ", got unexpected '" + t.text + "'";
      default: return ", got '" + t.text + "'";
    }
  }

  Term term() {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::LIdent: return make_const(advance().text);
      case TokenKind::Quoted: return make_const(advance().text);
      case TokenKind::Integer: return Term{TermKind::Integer, advance().text};
      case TokenKind::Variable: return make_var(advance().text);
      case TokenKind::UIdent:
        fail("uppercase identifier '" + t.text + "', variables are written ?" + t.text);
      default:
        fail("expected a term" + describe_here());
    }
  }

  Literal literal() {
    Literal l;
    if (peek().kind == TokenKind::Neg) {
      advance();
      l.negated = true;
    }
    if (peek().kind == TokenKind::UIdent)
      fail("uppercase identifier '" + peek().text + "' cannot start an atom");
    if (peek().kind != TokenKind::LIdent) fail("expected a predicate name" + describe_here());
    l.predicate = advance().text;
    if (peek().kind == TokenKind::LParen) {
      advance();
      l.args.push_back(term());
      while (peek().kind == TokenKind::Comma) {
        advance();
        l.args.push_back(term());
      }
      expect(TokenKind::RParen, "')'");
    }
    return l;
  }

  std::vector<BodyLiteral> body() {
    std::vector<BodyLiteral> out;
    for (;;) {
      BodyLiteral b;
      if (peek().kind == TokenKind::Naf) {
        advance();
        b.naf = true;
      }
      b.lit = literal();
      out.push_back(std::move(b));
      if (peek().kind != TokenKind::Comma) return out;
      advance();
    }
  }

  Statement statement() {
    Statement s;
    switch (peek().kind) {
      case TokenKind::QueryStart: {
        advance();
        s.kind = StatementKind::Query;
        s.body = body();
        expect(TokenKind::Dot, "'.'");
        return s;
      }
      case TokenKind::Overrides: {
        advance();
        s.kind = StatementKind::Override;
        expect(TokenKind::LParen, "'('");
        if (peek().kind != TokenKind::LIdent) fail("expected a rule label" + describe_here());
        std::string hi = advance().text;
        expect(TokenKind::Comma, "','");
        if (peek().kind != TokenKind::LIdent) fail("expected a rule label" + describe_here());
        std::string lo = advance().text;
        expect(TokenKind::RParen, "')'");
        expect(TokenKind::Dot, "'.'");
        s.override_pair = {hi, lo};
        return s;
      }
      case TokenKind::Label: {
        s.kind = StatementKind::DefeasibleRule;
        s.label = advance().text;
        s.head = literal();
        if (peek().kind == TokenKind::If) {
          advance();
          s.body = body();
        }
        expect(TokenKind::Dot, "'.'");
        return s;
      }
      case TokenKind::Error:
        fail(peek().text);
      default: {
        s.head = literal();
        if (peek().kind == TokenKind::If) {
          advance();
          s.kind = StatementKind::StrictRule;
          s.body = body();
        } else {
          // Bodyless and unlabeled: ground heads are facts; a non-ground head
          // becomes a bodyless strict rule, left for the compiler to reject
          // as unsafe.
          s.kind = s.head->is_ground() ? StatementKind::Fact : StatementKind::StrictRule;
        }
        expect(TokenKind::Dot, "'.'");
        return s;
      }
    }
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
};

}  // namespace

LogicProgram parse_program(const std::string& text) { return Parser(lex(text)).run(); }

}  // namespace logt::logic
