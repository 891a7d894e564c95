#pragma once

#include <string>
#include <vector>

namespace logt::logic {

enum class TokenKind {
  LIdent,      // lowercase-initial identifier
  UIdent,      // uppercase-initial identifier, rejected by the parser
  Quoted,      // 'single quoted', no escapes; text holds the inner characters
  Integer,
  Variable,    // ?name, text holds name
  QueryStart,  // ?-
  If,          // :-
  Label,       // @{name}, text holds name
  Neg,         // \neg
  Naf,         // \naf
  Overrides,   // \overrides
  LParen,
  RParen,
  Comma,
  Dot,
  Error,       // text holds the message
  End,
};

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  int line = 1;
};

// Lexes the whole text. Comments run from "//" to end of line. Errors become
// Error tokens in place; lexing always continues to the end. The final token
// is always End.
std::vector<Token> lex(const std::string& text);

}  // namespace logt::logic
