#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace smellcheck {

struct ParseDiagnostic {
  std::size_t line = 0;
  std::string message;

  friend bool operator==(const ParseDiagnostic&, const ParseDiagnostic&) = default;
};

enum class TokenKind { Identifier, Number, String, Char, Symbol };

struct Token {
  TokenKind kind = TokenKind::Symbol;
  std::string text;
  std::size_t line = 0;

  bool is(std::string_view s) const {
    return kind == TokenKind::Symbol && text == s;
  }
  bool is_ident() const { return kind == TokenKind::Identifier; }
  bool is_ident(std::string_view s) const { return is_ident() && text == s; }
};

struct LexResult {
  std::vector<Token> tokens;
  std::vector<ParseDiagnostic> diagnostics;
  std::size_t line_count = 0;
};

namespace detail {

inline bool ident_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' ||
         c == '$' || c >= 0x80;
}
inline bool ident_part(unsigned char c) {
  return ident_start(c) || (c >= '0' && c <= '9');
}

// Returns the length of a valid UTF-8 sequence starting at text[i], or 0.
inline std::size_t utf8_sequence_length(std::string_view text, std::size_t i) {
  auto c = static_cast<unsigned char>(text[i]);
  std::size_t len = 0;
  if (c < 0x80) return 1;
  if ((c & 0xE0) == 0xC0 && c >= 0xC2) len = 2;
  else if ((c & 0xF0) == 0xE0) len = 3;
  else if ((c & 0xF8) == 0xF0 && c <= 0xF4) len = 4;
  else return 0;
  if (i + len > text.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    if ((static_cast<unsigned char>(text[i + k]) & 0xC0) != 0x80) return 0;
  }
  return len;
}

}  // namespace detail

/// Splits Java source into tokens, dropping whitespace and comments.
/// Never fails: malformed input produces diagnostics and best-effort tokens.
inline LexResult lex_java(std::string_view text) {
  LexResult out;
  std::size_t line = 1;
  std::size_t i = 0;
  const std::size_t n = text.size();
  bool reported_encoding = false;

  auto push = [&](TokenKind kind, std::size_t begin, std::size_t end,
                  std::size_t at_line) {
    out.tokens.push_back(
        Token{kind, std::string(text.substr(begin, end - begin)), at_line});
  };

  while (i < n) {
    auto c = static_cast<unsigned char>(text[i]);
    if (c >= 0x80 && detail::utf8_sequence_length(text, i) == 0) {
      if (!reported_encoding) {
        out.diagnostics.push_back({line, "invalid UTF-8 byte sequence"});
        reported_encoding = true;
      }
      ++i;
      continue;
    }
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == '\f') {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && text[i + 1] == '/') {
      while (i < n && text[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && text[i + 1] == '*') {
      const std::size_t start_line = line;
      i += 2;
      bool closed = false;
      while (i < n) {
        if (text[i] == '*' && i + 1 < n && text[i + 1] == '/') {
          i += 2;
          closed = true;
          break;
        }
        if (text[i] == '\n') ++line;
        ++i;
      }
      if (!closed) {
        out.diagnostics.push_back({start_line, "unterminated block comment"});
      }
      continue;
    }
    if (c == '"' && text.substr(i, 3) == "\"\"\"") {
      const std::size_t begin = i;
      const std::size_t start_line = line;
      i += 3;
      bool closed = false;
      while (i < n) {
        if (text[i] == '\\' && i + 1 < n) {
          if (text[i + 1] == '\n') ++line;
          i += 2;
          continue;
        }
        if (text.substr(i, 3) == "\"\"\"") {
          i += 3;
          closed = true;
          break;
        }
        if (text[i] == '\n') ++line;
        ++i;
      }
      if (!closed) {
        out.diagnostics.push_back({start_line, "unterminated text block"});
      }
      push(TokenKind::String, begin, i, start_line);
      continue;
    }
    if (c == '"' || c == '\'') {
      const char quote = static_cast<char>(c);
      const std::size_t begin = i;
      ++i;
      bool closed = false;
      while (i < n && text[i] != '\n') {
        if (text[i] == '\\' && i + 1 < n && text[i + 1] != '\n') {
          i += 2;
          continue;
        }
        if (text[i] == quote) {
          ++i;
          closed = true;
          break;
        }
        ++i;
      }
      if (!closed) {
        out.diagnostics.push_back(
            {line, quote == '"' ? "unterminated string literal"
                                : "unterminated character literal"});
      }
      push(quote == '"' ? TokenKind::String : TokenKind::Char, begin, i, line);
      continue;
    }
    if (detail::ident_start(c)) {
      const std::size_t begin = i;
      while (i < n && detail::ident_part(static_cast<unsigned char>(text[i]))) {
        if (static_cast<unsigned char>(text[i]) >= 0x80) {
          std::size_t len = detail::utf8_sequence_length(text, i);
          if (len == 0) break;
          i += len;
        } else {
          ++i;
        }
      }
      push(TokenKind::Identifier, begin, i, line);
      continue;
    }
    if ((c >= '0' && c <= '9') ||
        (c == '.' && i + 1 < n && text[i + 1] >= '0' && text[i + 1] <= '9')) {
      const std::size_t begin = i;
      while (i < n) {
        auto d = static_cast<unsigned char>(text[i]);
        if (detail::ident_part(d) || d == '.') {
          ++i;
        } else if ((d == '+' || d == '-') && i > begin &&
                   (text[i - 1] == 'e' || text[i - 1] == 'E' ||
                    text[i - 1] == 'p' || text[i - 1] == 'P')) {
          ++i;
        } else {
          break;
        }
      }
      push(TokenKind::Number, begin, i, line);
      continue;
    }

    // Generic closers (>>, >>>) stay split so type arguments balance.
    static constexpr std::string_view kMulti[] = {
        "...", "<<=", "->", "::", "==", "!=", "<=", ">=", "&&", "||",
        "++",  "--",  "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^="};
    std::size_t len = 1;
    for (auto op : kMulti) {
      if (text.substr(i, op.size()) == op) {
        len = op.size();
        break;
      }
    }
    if (len == 3 && text.substr(i, 3) == "<<=") len = 1;
    push(TokenKind::Symbol, i, i + len, line);
    i += len;
  }
  out.line_count = text.empty() ? 0 : line - (text.back() == '\n' ? 1 : 0);
  return out;
}

}  // namespace smellcheck
