#include "tabsynth/postprocess.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace tabsynth {

std::string_view to_string(RewriteForm f) {
  switch (f) {
    case RewriteForm::assign: return "assign";
    case RewriteForm::indexed_assign: return "indexed-assign";
    case RewriteForm::print: return "print";
    case RewriteForm::bare_expr: return "bare-expr";
    case RewriteForm::none: return "none";
  }
  return "none";
}

const std::vector<std::string>& common_imports() {
  static const std::vector<std::string> imports{"import pandas as pd", "import numpy as np"};
  return imports;
}

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (true) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

std::string_view rtrim(std::string_view s) {
  while (!s.empty() && is_ws(s.back())) s.remove_suffix(1);
  return s;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (is_ws(s.front()) || s.front() == '\n')) s.remove_prefix(1);
  while (!s.empty() && (is_ws(s.back()) || s.back() == '\n')) s.remove_suffix(1);
  return s;
}

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' ||
         static_cast<unsigned char>(c) >= 0x80;
}
bool is_ident_char(char c) {
  return is_ident_start(c) || std::isdigit(static_cast<unsigned char>(c));
}

// Lexical state carried across physical lines. Only triple-quoted strings
// and open brackets span lines; a single-quoted string ends at end of line.
struct LexState {
  char triple_quote = 0;  // ' or " while inside a triple-quoted string
  int depth = 0;
  bool backslash = false;  // previous line ended with a continuation backslash

  bool in_string() const { return triple_quote != 0; }
};

// Advances `st` over one physical line (without its newline).
void lex_line(std::string_view line, LexState& st) {
  std::size_t i = 0;
  st.backslash = false;
  while (i < line.size()) {
    char c = line[i];
    if (st.triple_quote) {
      if (c == '\\') {
        i += 2;
        continue;
      }
      if (c == st.triple_quote && line.substr(i, 3) == std::string(3, c)) {
        st.triple_quote = 0;
        i += 3;
        continue;
      }
      ++i;
      continue;
    }
    if (c == '#') return;
    if (c == '\'' || c == '"') {
      if (line.substr(i, 3) == std::string(3, c)) {
        st.triple_quote = c;
        i += 3;
        continue;
      }
      ++i;
      while (i < line.size() && line[i] != c) i += line[i] == '\\' ? 2 : 1;
      ++i;
      continue;
    }
    if (c == '(' || c == '[' || c == '{') ++st.depth;
    if ((c == ')' || c == ']' || c == '}') && st.depth > 0) --st.depth;
    if (c == '\\' && i + 1 == line.size()) st.backslash = true;
    ++i;
  }
}

std::string decode_entities_once(std::string_view s) {
  static constexpr std::array<std::pair<std::string_view, char>, 5> entities{{
      {"&lt;", '<'}, {"&gt;", '>'}, {"&amp;", '&'}, {"&quot;", '"'}, {"&#39;", '\''}}};
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    bool replaced = false;
    if (s[i] == '&') {
      for (const auto& [name, ch] : entities) {
        if (s.substr(i, name.size()) == name) {
          out.push_back(ch);
          i += name.size();
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) out.push_back(s[i++]);
  }
  return out;
}

}  // namespace

std::string cleanup(std::string_view raw) {
  std::string text(raw);
  for (std::string next = decode_entities_once(text); next != text;
       next = decode_entities_once(text)) {
    text = std::move(next);
  }

  std::vector<std::string_view> kept;
  LexState st;
  bool seen_code = false;
  for (std::string_view line : split_lines(text)) {
    if (st.in_string()) {
      lex_line(line, st);
      kept.push_back(st.in_string() ? line : rtrim(line));
      continue;
    }
    std::string_view body = trim(line);
    if (!line.empty() && line.front() == '#' && seen_code) break;
    if (body.empty() || body.front() == '#') continue;
    lex_line(line, st);
    kept.push_back(st.in_string() ? line : rtrim(line));
    seen_code = true;
  }

  std::string out;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (i) out.push_back('\n');
    out += kept[i];
  }
  return out;
}

namespace {

struct Statement {
  std::string text;
  bool top_level = true;  // starts at column 0
};

// Groups physical lines into top-level statements: a statement starts at a
// column-0 line that is not a continuation (bracket, backslash or string).
std::vector<Statement> split_statements(std::string_view code) {
  std::vector<Statement> out;
  LexState st;
  for (std::string_view line : split_lines(code)) {
    bool continuation = st.in_string() || st.depth > 0 || st.backslash;
    bool starts_top = !continuation && !line.empty() && !is_ws(line.front());
    if (starts_top || out.empty()) {
      out.push_back(Statement{std::string(line), starts_top});
    } else {
      out.back().text += '\n';
      out.back().text += line;
    }
    lex_line(line, st);
  }
  return out;
}

bool is_keyword_statement(std::string_view stmt) {
  static const std::array<std::string_view, 22> keywords{
      "def",    "class",  "if",     "elif",     "else",   "for",    "while", "with",
      "try",    "except", "finally", "import",  "from",   "return", "pass",  "break",
      "continue", "raise", "del",   "assert",   "global", "nonlocal"};
  if (!stmt.empty() && stmt.front() == '@') return true;
  std::size_t n = 0;
  while (n < stmt.size() && is_ident_char(stmt[n])) ++n;
  std::string_view word = stmt.substr(0, n);
  if (word == "async") return true;
  return std::find(keywords.begin(), keywords.end(), word) != keywords.end();
}

enum class AssignKind { none, plain, augmented };

struct AssignSplit {
  AssignKind kind = AssignKind::none;
  std::size_t pos = 0;  // index of '=' for plain assignment
};

// Walks `s` at bracket depth 0, outside strings and comments, and reports
// the first assignment operator.
AssignSplit find_assignment(std::string_view s) {
  static constexpr std::string_view op_chars = "=!<>:+-*/%&|^@~";
  int depth = 0;
  char quote = 0;
  bool triple = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (quote) {
      if (c == '\\') {
        ++i;
      } else if (c == quote) {
        if (!triple) {
          quote = 0;
        } else if (s.substr(i, 3) == std::string(3, c)) {
          quote = 0;
          i += 2;
        }
      } else if (c == '\n' && !triple) {
        quote = 0;
      }
      continue;
    }
    if (c == '#') {
      while (i < s.size() && s[i] != '\n') ++i;
      continue;
    }
    if (c == '\'' || c == '"') {
      quote = c;
      triple = s.substr(i, 3) == std::string(3, c);
      if (triple) i += 2;
      continue;
    }
    if (c == '(' || c == '[' || c == '{') ++depth;
    if ((c == ')' || c == ']' || c == '}') && depth > 0) --depth;
    if (c != '=' || depth != 0) continue;
    char prev = i > 0 ? s[i - 1] : ' ';
    char next = i + 1 < s.size() ? s[i + 1] : ' ';
    if (next == '=') {
      ++i;  // '==' comparison
      continue;
    }
    if (op_chars.find(prev) != std::string_view::npos) {
      if (prev == '<' || prev == '>' || prev == '!' || prev == '=') {
        bool shift = i >= 2 && s[i - 2] == prev && (prev == '<' || prev == '>');
        if (!shift) continue;  // comparison
      }
      if (prev == ':') continue;  // walrus
      return {AssignKind::augmented, i};
    }
    return {AssignKind::plain, i};
  }
  return {};
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !is_ident_start(s.front())) return false;
  return std::all_of(s.begin(), s.end(), is_ident_char);
}

// Index one past the bracket closing the one opened at s[open], or npos.
std::size_t match_bracket(std::string_view s, std::size_t open) {
  int depth = 0;
  char quote = 0;
  for (std::size_t i = open; i < s.size(); ++i) {
    char c = s[i];
    if (quote) {
      if (c == '\\') {
        ++i;
      } else if (c == quote) {
        quote = 0;
      }
      continue;
    }
    if (c == '\'' || c == '"') {
      quote = c;
    } else if (c == '(' || c == '[' || c == '{') {
      ++depth;
    } else if (c == ')' || c == ']' || c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

// `name(.attr | [..])*[..]` -> name; empty if the target has another shape.
std::string subscript_base(std::string_view target) {
  std::size_t n = 0;
  while (n < target.size() && is_ident_char(target[n])) ++n;
  if (n == 0 || !is_ident_start(target.front())) return {};
  std::size_t i = n;
  bool last_was_subscript = false;
  while (i < target.size()) {
    char c = target[i];
    if (is_ws(c)) {
      ++i;
      continue;
    }
    if (c == '[') {
      std::size_t end = match_bracket(target, i);
      if (end == std::string_view::npos) return {};
      i = end;
      last_was_subscript = true;
    } else if (c == '.') {
      ++i;
      std::size_t start = i;
      while (i < target.size() && is_ident_char(target[i])) ++i;
      if (i == start) return {};
      last_was_subscript = false;
    } else {
      return {};
    }
  }
  return last_was_subscript ? std::string(target.substr(0, n)) : std::string();
}

// Top-level comma-separated pieces of the text between the parentheses.
std::optional<std::string> first_print_argument(std::string_view stmt) {
  std::string_view s = trim(stmt);
  if (s.substr(0, 5) != "print") return std::nullopt;
  std::size_t i = 5;
  while (i < s.size() && is_ws(s[i])) ++i;
  if (i >= s.size() || s[i] != '(') return std::nullopt;
  std::size_t close = match_bracket(s, i);
  if (close == std::string_view::npos) return std::nullopt;
  std::string_view rest = trim(s.substr(close));
  if (!rest.empty() && rest.front() != '#' && rest != ";") return std::nullopt;

  std::string_view inner = s.substr(i + 1, close - i - 2);
  int depth = 0;
  char quote = 0;
  std::size_t end = inner.size();
  for (std::size_t j = 0; j < inner.size(); ++j) {
    char c = inner[j];
    if (quote) {
      if (c == '\\') {
        ++j;
      } else if (c == quote) {
        quote = 0;
      }
      continue;
    }
    if (c == '\'' || c == '"') {
      quote = c;
    } else if (c == '(' || c == '[' || c == '{') {
      ++depth;
    } else if (c == ')' || c == ']' || c == '}') {
      --depth;
    } else if (c == ',' && depth == 0) {
      end = j;
      break;
    }
  }
  std::string_view arg = trim(inner.substr(0, end));
  if (arg.empty() || arg.front() == '*') return std::nullopt;
  if (find_assignment(arg).kind != AssignKind::none) return std::nullopt;  // keyword argument
  return std::string(arg);
}

std::string fresh_output_var(std::string_view cleaned, std::string_view preamble) {
  std::string name = "var_out";
  for (int suffix = 1; cleaned.find(name) != std::string_view::npos ||
                       preamble.find(name) != std::string_view::npos;
       ++suffix) {
    name = "var_out" + std::to_string(suffix);
  }
  return name;
}

bool has_line(std::string_view text, std::string_view wanted) {
  for (std::string_view line : split_lines(text)) {
    if (trim(line) == wanted) return true;
  }
  return false;
}

std::string join(const std::vector<Statement>& stmts, std::size_t count) {
  std::string out;
  for (std::size_t i = 0; i < count; ++i) {
    if (!out.empty()) out.push_back('\n');
    out += stmts[i].text;
  }
  return out;
}

}  // namespace

Completion rewrite(std::string_view cleaned, std::string_view input_preamble) {
  Completion c;
  c.cleaned = std::string(cleaned);
  c.output_var = fresh_output_var(cleaned, input_preamble);
  if (trim(cleaned).empty()) return c;

  std::vector<Statement> stmts = split_statements(cleaned);
  std::string body;
  for (std::size_t idx = stmts.size(); idx-- > 0;) {
    const Statement& st = stmts[idx];
    if (!st.top_level) continue;
    std::string_view text = rtrim(st.text);
    if (is_keyword_statement(text)) continue;

    AssignSplit split = find_assignment(text);
    if (split.kind == AssignKind::augmented) continue;
    if (split.kind == AssignKind::plain) {
      std::string_view target = trim(text.substr(0, split.pos));
      if (auto colon = target.find(':'); colon != std::string_view::npos &&
                                         target.find('[') == std::string_view::npos) {
        target = trim(target.substr(0, colon));  // annotated assignment
      }
      if (is_identifier(target)) {
        c.form = RewriteForm::assign;
        body = std::string(rtrim(cleaned)) + "\n" + c.output_var + " = " + std::string(target);
        break;
      }
      if (std::string base = subscript_base(target); !base.empty()) {
        c.form = RewriteForm::indexed_assign;
        body = std::string(rtrim(cleaned)) + "\n" + c.output_var + " = " + base;
        break;
      }
      continue;
    }
    std::string prefix = join(stmts, idx);
    if (!prefix.empty()) prefix.push_back('\n');
    if (auto arg = first_print_argument(text)) {
      c.form = RewriteForm::print;
      body = prefix + c.output_var + " = " + *arg;
      break;
    }
    if (trim(text).substr(0, 5) == "print") continue;  // print() without a usable argument
    c.form = RewriteForm::bare_expr;
    body = prefix + c.output_var + " = " + std::string(trim(text));
    break;
  }
  if (c.form == RewriteForm::none) return c;

  std::string program;
  for (const std::string& imp : common_imports()) {
    if (!has_line(cleaned, imp) && !has_line(input_preamble, imp)) program += imp + "\n";
  }
  if (!input_preamble.empty()) {
    program += input_preamble;
    program += '\n';
  }
  program += body;
  c.program = std::move(program);
  return c;
}

Completion process_completion(std::string_view raw, std::string_view input_preamble) {
  Completion c = rewrite(cleanup(raw), input_preamble);
  c.raw = std::string(raw);
  return c;
}

}  // namespace tabsynth
