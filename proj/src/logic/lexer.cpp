#include "logt/logic/lexer.hpp"

#include <cctype>

namespace logt::logic {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

std::vector<Token> lex(const std::string& text) {
  std::vector<Token> out;
  size_t i = 0;
  const size_t n = text.size();
  int line = 1;

  auto push = [&](TokenKind k, std::string t) { out.push_back(Token{k, std::move(t), line}); };

  while (i < n) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && text[i + 1] == '/') {
      while (i < n && text[i] != '\n') ++i;
      continue;
    }
    if (c == '\'') {
      size_t j = i + 1;
      while (j < n && text[j] != '\'' && text[j] != '\n') ++j;
      if (j >= n || text[j] != '\'') {
        push(TokenKind::Error, "unterminated quote");
        i = j;
        continue;
      }
      push(TokenKind::Quoted, text.substr(i + 1, j - i - 1));
      i = j + 1;
      continue;
    }
    if (c == '\\') {
      size_t j = i + 1;
      while (j < n && ident_char(text[j])) ++j;
      std::string word = text.substr(i + 1, j - i - 1);
      if (word == "neg")
        push(TokenKind::Neg, word);
      else if (word == "naf")
        push(TokenKind::Naf, word);
      else if (word == "overrides")
        push(TokenKind::Overrides, word);
      else
        push(TokenKind::Error, "unknown escape \\" + word);
      i = j;
      continue;
    }
    if (c == '@') {
      if (i + 1 < n && text[i + 1] == '{') {
        size_t j = i + 2;
        while (j < n && ident_char(text[j])) ++j;
        if (j < n && text[j] == '}' && j > i + 2) {
          push(TokenKind::Label, text.substr(i + 2, j - i - 2));
          i = j + 1;
          continue;
        }
      }
      push(TokenKind::Error, "malformed label, expected @{name}");
      ++i;
      continue;
    }
    if (c == '?') {
      if (i + 1 < n && text[i + 1] == '-') {
        push(TokenKind::QueryStart, "?-");
        i += 2;
        continue;
      }
      if (i + 1 < n && ident_start(text[i + 1])) {
        size_t j = i + 1;
        while (j < n && ident_char(text[j])) ++j;
        push(TokenKind::Variable, text.substr(i + 1, j - i - 1));
        i = j;
        continue;
      }
      push(TokenKind::Error, "stray '?'");
      ++i;
      continue;
    }
    if (c == ':') {
      if (i + 1 < n && text[i + 1] == '-') {
        push(TokenKind::If, ":-");
        i += 2;
        continue;
      }
      push(TokenKind::Error, "stray ':'");
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && i + 1 < n && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
      size_t j = i + 1;
      while (j < n && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      push(TokenKind::Integer, text.substr(i, j - i));
      i = j;
      continue;
    }
    if (ident_start(c)) {
      size_t j = i;
      while (j < n && ident_char(text[j])) ++j;
      std::string word = text.substr(i, j - i);
      push(std::isupper(static_cast<unsigned char>(c)) ? TokenKind::UIdent : TokenKind::LIdent,
           word);
      i = j;
      continue;
    }
    switch (c) {
      case '(': push(TokenKind::LParen, "("); break;
      case ')': push(TokenKind::RParen, ")"); break;
      case ',': push(TokenKind::Comma, ","); break;
      case '.': push(TokenKind::Dot, "."); break;
      default: push(TokenKind::Error, std::string("unexpected character '") + c + "'"); break;
    }
    ++i;
  }
  out.push_back(Token{TokenKind::End, "", line});
  return out;
}

}  // namespace logt::logic
