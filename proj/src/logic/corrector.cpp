#include "logt/logic/corrector.hpp"

#include <cctype>

#include "logt/logic/parser.hpp"

namespace logt::logic {

namespace {

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// True at positions lying inside a quoted constant, quote marks included.
std::vector<bool> quote_mask(const std::string& s) {
  std::vector<bool> m(s.size(), false);
  bool in = false;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\'') {
      m[i] = true;
      in = !in;
    } else {
      m[i] = in;
    }
  }
  return m;
}

// Index where a trailing // comment starts, or npos.
size_t comment_start(const std::string& s) {
  auto m = quote_mask(s);
  for (size_t i = 0; i + 1 < s.size(); ++i)
    if (!m[i] && s[i] == '/' && s[i + 1] == '/') return i;
  return std::string::npos;
}

struct Line {
  int number;
  std::string text;
};

struct Span {
  size_t begin, end;  // [begin, end) of a word in the code string
};

std::vector<Span> words(const std::string& code, const std::vector<bool>& mask) {
  std::vector<Span> out;
  size_t i = 0;
  while (i < code.size()) {
    if (!mask[i] && word_char(code[i])) {
      size_t j = i;
      while (j < code.size() && !mask[j] && word_char(code[j])) ++j;
      out.push_back({i, j});
      i = j;
    } else {
      ++i;
    }
  }
  return out;
}

bool is_stopword(const std::string& w) {
  return w == "not" || w == "neg" || w == "naf" || w == "overrides";
}

// Rule 1 keep test. Blank lines and comment lines are kept; fence markers and
// prose are not. Uppercase-initial lines survive only when they look like a
// statement (an atom call or a rule), since rules 3 and 4 can still fix them.
bool keeps_line(const std::string& raw) {
  std::string t = trim(raw);
  if (t.empty()) return true;
  if (t.rfind("```", 0) == 0) return false;
  char c = t[0];
  if (c == '/') return t.rfind("//", 0) == 0;
  if (std::islower(static_cast<unsigned char>(c))) return true;
  if (c == '\\' || c == '@' || c == '\'' || c == '~' || c == '?') return true;
  if (std::isupper(static_cast<unsigned char>(c))) {
    if (t.find(":-") != std::string::npos) return true;
    size_t i = 0;
    while (i < t.size() &&
           (word_char(t[i]) || t[i] == ' ' || t[i] == '-' || t[i] == '\''))
      ++i;
    return i < t.size() && t[i] == '(';
  }
  return false;
}

// Rule 3: bare uppercase-initial identifiers become variables. Skips quoted
// text, label bodies, variables, predicate positions (followed by '('), and
// hyphen-adjacent words which rule 4 will join. Override statements carry rule
// labels, never variables, so those lines are skipped whole.
std::string fix_variables(const std::string& code) {
  if (code.find("overrides") != std::string::npos) return code;
  auto mask = quote_mask(code);
  std::string out;
  size_t last = 0;
  for (const Span& w : words(code, mask)) {
    char first = code[w.begin];
    if (!std::isupper(static_cast<unsigned char>(first))) continue;
    char prev = w.begin > 0 ? code[w.begin - 1] : ' ';
    char next = w.end < code.size() ? code[w.end] : ' ';
    if (prev == '?' || prev == '{' || prev == '-' || next == '-' || next == '(') continue;
    out += code.substr(last, w.begin - last);
    out += '?';
    last = w.begin;
  }
  out += code.substr(last);
  return out;
}

// Rule 4a: word-word joins to word_word.
std::string join_hyphens(const std::string& code) {
  auto mask = quote_mask(code);
  std::string out = code;
  for (size_t i = 1; i + 1 < out.size(); ++i)
    if (!mask[i] && out[i] == '-' && word_char(out[i - 1]) && word_char(out[i + 1])) out[i] = '_';
  return out;
}

// Rule 4b: join space-separated names. Two sites: a multi-word run directly
// before '(' (a predicate name), and multi-word argument segments inside
// parens. Runs containing variables or operator words are left alone.
std::string join_spaces(const std::string& code) {
  auto mask = quote_mask(code);
  auto ws = words(code, mask);
  std::vector<bool> join_next(ws.size(), false);  // join word i with word i+1

  auto plain = [&](size_t k) {
    char prev = ws[k].begin > 0 ? code[ws[k].begin - 1] : ' ';
    return prev != '?' && prev != '\\' && prev != '{';
  };
  auto gap_is_spaces = [&](size_t k) {
    for (size_t i = ws[k].end; i < ws[k + 1].begin; ++i)
      if (code[i] != ' ' && code[i] != '\t') return false;
    return ws[k + 1].begin > ws[k].end;
  };
  // Paren depth at the start of each word.
  std::vector<int> depth(ws.size(), 0);
  {
    int d = 0;
    size_t wi = 0;
    for (size_t i = 0; i < code.size(); ++i) {
      while (wi < ws.size() && ws[wi].begin == i) depth[wi++] = d;
      if (mask[i]) continue;
      if (code[i] == '(') ++d;
      if (code[i] == ')') --d;
    }
  }

  for (size_t k = 0; k + 1 < ws.size(); ++k) {
    if (!gap_is_spaces(k) || !plain(k) || !plain(k + 1)) continue;
    std::string wk(code, ws[k].begin, ws[k].end - ws[k].begin);
    if (depth[k] > 0) {
      // Inside an argument list: join multi-word constants.
      join_next[k] = true;
    } else {
      // Top level: join only when the run ends at a '(' and no run member is
      // an operator word.
      if (is_stopword(wk)) continue;
      size_t e = k + 1;
      bool bad = false;
      while (e + 1 < ws.size() && gap_is_spaces(e) && plain(e + 1)) {
        if (is_stopword(std::string(code, ws[e].begin, ws[e].end - ws[e].begin))) bad = true;
        ++e;
      }
      if (is_stopword(std::string(code, ws[e].begin, ws[e].end - ws[e].begin))) bad = true;
      size_t after = ws[e].end;
      while (after < code.size() && (code[after] == ' ' || code[after] == '\t')) ++after;
      if (bad || after >= code.size() || code[after] != '(') continue;
      for (size_t k2 = k; k2 < e; ++k2) join_next[k2] = true;
    }
  }

  std::string out;
  size_t last = 0;
  for (size_t k = 0; k + 1 < ws.size(); ++k) {
    if (!join_next[k]) continue;
    out += code.substr(last, ws[k].end - last);
    out += '_';
    last = ws[k + 1].begin;
  }
  out += code.substr(last);
  return out;
}

// Rule 4c: lowercase the initial of remaining uppercase-initial names.
std::string lowercase_initials(const std::string& code) {
  auto mask = quote_mask(code);
  std::string out = code;
  for (const Span& w : words(out, mask)) {
    char prev = w.begin > 0 ? out[w.begin - 1] : ' ';
    if (prev == '?') continue;
    out[w.begin] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[w.begin])));
  }
  return out;
}

// Rule 5: operator spellings.
std::string fix_operators(const std::string& code) {
  std::string out = code;

  // ~ -> \neg .
  for (;;) {
    auto mask = quote_mask(out);
    size_t pos = std::string::npos;
    for (size_t i = 0; i < out.size(); ++i)
      if (!mask[i] && out[i] == '~') {
        pos = i;
        break;
      }
    if (pos == std::string::npos) break;
    out = out.substr(0, pos) + "\\neg " + out.substr(pos + 1);
  }

  // Standalone "not " -> "\neg ".
  for (;;) {
    auto mask = quote_mask(out);
    auto ws = words(out, mask);
    size_t pos = std::string::npos;
    for (const Span& w : ws) {
      if (out.compare(w.begin, w.end - w.begin, "not") != 0) continue;
      char prev = w.begin > 0 ? out[w.begin - 1] : ' ';
      if (prev == '\\' || prev == '?' || word_char(prev)) continue;
      if (w.end >= out.size() || (out[w.end] != ' ' && out[w.end] != '\t')) continue;
      pos = w.begin;
      break;
    }
    if (pos == std::string::npos) break;
    out = out.substr(0, pos) + "\\neg" + out.substr(pos + 3);
  }

  // neg(...) -> \neg ... with the matching paren removed.
  for (;;) {
    auto mask = quote_mask(out);
    auto ws = words(out, mask);
    bool changed = false;
    for (const Span& w : ws) {
      if (out.compare(w.begin, w.end - w.begin, "neg") != 0) continue;
      char prev = w.begin > 0 ? out[w.begin - 1] : ' ';
      if (prev == '\\' || prev == '?' || word_char(prev)) continue;
      if (w.end >= out.size() || out[w.end] != '(') continue;
      int d = 0;
      size_t close = std::string::npos;
      for (size_t i = w.end; i < out.size(); ++i) {
        if (mask[i]) continue;
        if (out[i] == '(') ++d;
        if (out[i] == ')' && --d == 0) {
          close = i;
          break;
        }
      }
      if (close == std::string::npos) continue;
      out = out.substr(0, w.begin) + "\\neg " + out.substr(w.end + 1, close - w.end - 1) +
            out.substr(close + 1);
      changed = true;
      break;
    }
    if (!changed) break;
  }

  // overrides( -> \overrides(.
  for (;;) {
    auto mask = quote_mask(out);
    auto ws = words(out, mask);
    size_t pos = std::string::npos;
    for (const Span& w : ws) {
      if (out.compare(w.begin, w.end - w.begin, "overrides") != 0) continue;
      char prev = w.begin > 0 ? out[w.begin - 1] : ' ';
      if (prev == '\\' || prev == '?' || word_char(prev)) continue;
      if (w.end >= out.size() || out[w.end] != '(') continue;
      pos = w.begin;
      break;
    }
    if (pos == std::string::npos) break;
    out = out.substr(0, pos) + "\\" + out.substr(pos);
  }

  return out;
}

bool parses_clean(const std::string& code) {
  LogicProgram p = parse_program(code);
  return p.diagnostics.empty() && !p.statements.empty();
}

// Rule 6: a line that fails to parse may be missing closing parens.
std::string balance_parens(const std::string& code) {
  std::string t = code;
  size_t dot = t.find_last_not_of(" \t");
  if (dot == std::string::npos || t[dot] != '.') return code;
  if (parses_clean(code)) return code;
  for (int k = 1; k <= 2; ++k) {
    std::string cand = t.substr(0, dot) + std::string(k, ')') + t.substr(dot);
    if (parses_clean(cand)) return cand;
  }
  return code;
}

}  // namespace

CorrectionResult correct_syntax(const std::string& raw) {
  CorrectionResult res;

  std::vector<Line> lines;
  {
    int number = 1;
    size_t start = 0;
    for (size_t i = 0; i <= raw.size(); ++i) {
      if (i == raw.size() || raw[i] == '\n') {
        std::string text = raw.substr(start, i - start);
        if (!text.empty() && text.back() == '\r') text.pop_back();
        lines.push_back({number++, std::move(text)});
        start = i + 1;
      }
    }
    if (!raw.empty() && raw.back() == '\n') lines.pop_back();
  }

  // Rule 1.
  std::vector<Line> kept;
  for (const Line& l : lines) {
    if (keeps_line(l.text)) {
      kept.push_back(l);
    } else {
      res.log.push_back({l.number, 1, l.text, ""});
    }
  }

  // Rules 2..6 work on the code part of each line; comments ride along.
  auto apply = [&](int rule, auto&& fn) {
    for (Line& l : kept) {
      size_t cs = comment_start(l.text);
      std::string code = cs == std::string::npos ? l.text : l.text.substr(0, cs);
      std::string comment = cs == std::string::npos ? "" : l.text.substr(cs);
      if (trim(code).empty()) continue;
      std::string fixed = fn(code);
      if (fixed != code) {
        std::string next = fixed + comment;
        res.log.push_back({l.number, rule, l.text, next});
        l.text = std::move(next);
      }
    }
  };

  apply(2, [](const std::string& code) {
    size_t last = code.find_last_not_of(" \t");
    char c = code[last];
    if (c == '.' || c == ',' || c == '(') return code;
    if (c == '-' && last > 0 && code[last - 1] == ':') return code;
    return code.substr(0, last + 1) + "." + code.substr(last + 1);
  });
  apply(3, fix_variables);
  apply(4, [](const std::string& code) {
    return lowercase_initials(join_spaces(join_hyphens(code)));
  });
  apply(5, fix_operators);
  apply(6, balance_parens);

  for (size_t i = 0; i < kept.size(); ++i) {
    res.text += kept[i].text;
    res.text += '\n';
  }
  return res;
}

}  // namespace logt::logic
