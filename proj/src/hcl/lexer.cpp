#include "tfsmell/hcl/lexer.hpp"

#include <optional>

namespace tfsmell::hcl {

SourceSpan cover(const SourceSpan& first, const SourceSpan& last) {
  SourceSpan s = first;
  s.end_line = last.end_line;
  s.end_col = last.end_col;
  s.end = last.end;
  return s;
}

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Identifier: return "identifier";
    case TokenKind::String: return "string";
    case TokenKind::Number: return "number";
    case TokenKind::Bool: return "bool";
    case TokenKind::Punctuation: return "punctuation";
    case TokenKind::BlockOpen: return "block-open";
    case TokenKind::BlockClose: return "block-close";
    case TokenKind::Assign: return "assign";
    case TokenKind::Heredoc: return "heredoc";
    case TokenKind::Comment: return "comment";
    case TokenKind::Newline: return "newline";
    case TokenKind::Eof: return "eof";
    case TokenKind::Error: return "error";
  }
  return "unknown";
}

namespace {

bool is_ident_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c >= 0x80;
}

bool is_ident_char(unsigned char c) {
  return is_ident_start(c) || (c >= '0' && c <= '9') || c == '-';
}

bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  Lexer(std::string_view text, std::uint32_t file_id) : src_(text), file_id_(file_id) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    std::string leading;
    if (src_.starts_with("\xEF\xBB\xBF")) {
      // The BOM is kept as trivia but does not occupy a column.
      leading = src_.substr(0, 3);
      pos_ = 3;
    }
    while (true) {
      std::size_t ws = pos_;
      while (pos_ < src_.size()) {
        char c = src_[pos_];
        if (c == ' ' || c == '\t' || c == '\f' || c == '\v' ||
            (c == '\r' && peek(1) != '\n')) {
          advance(1);
        } else {
          break;
        }
      }
      leading.append(src_.substr(ws, pos_ - ws));
      if (pos_ >= src_.size()) {
        Token eof;
        eof.kind = TokenKind::Eof;
        eof.span = here();
        eof.leading = std::move(leading);
        out.push_back(std::move(eof));
        return out;
      }
      Token tok = next();
      tok.leading = std::move(leading);
      leading.clear();
      out.push_back(std::move(tok));
    }
  }

 private:
  std::string_view src_;
  std::uint32_t file_id_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t col_ = 1;

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  SourceSpan here() const {
    return SourceSpan{file_id_, line_, col_, line_, col_, pos_, pos_};
  }

  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i, ++pos_) {
      auto c = static_cast<unsigned char>(src_[pos_]);
      if (c == '\n') {
        ++line_;
        col_ = 1;
      } else if ((c & 0xC0) != 0x80) {
        ++col_;
      }
    }
  }

  Token make(TokenKind kind, const SourceSpan& start) const {
    Token t;
    t.kind = kind;
    t.span = start;
    t.span.end_line = line_;
    t.span.end_col = col_;
    t.span.end = pos_;
    t.text = std::string(src_.substr(start.begin, pos_ - start.begin));
    return t;
  }

  Token error(const SourceSpan& start, std::string message) const {
    Token t = make(TokenKind::Error, start);
    t.error = std::move(message);
    return t;
  }

  std::size_t line_end(std::size_t from) const {
    std::size_t e = src_.find('\n', from);
    if (e == std::string_view::npos) return src_.size();
    if (e > from && src_[e - 1] == '\r') --e;
    return e;
  }

  // Scans a quoted string body starting just after the opening quote.
  // Returns the offset one past the closing quote.
  std::optional<std::size_t> scan_quoted(std::size_t p) const {
    while (p < src_.size()) {
      char c = src_[p];
      if (c == '\\') {
        p += 2;
      } else if (c == '"') {
        return p + 1;
      } else if (c == '\n') {
        return std::nullopt;
      } else if ((c == '$' || c == '%') && p + 2 < src_.size() && src_[p + 1] == c &&
                 src_[p + 2] == '{') {
        p += 3;  // $${ and %%{ are literal escapes
      } else if ((c == '$' || c == '%') && p + 1 < src_.size() && src_[p + 1] == '{') {
        auto after = scan_interpolation(p + 2);
        if (!after) return std::nullopt;
        p = *after;
      } else {
        ++p;
      }
    }
    return std::nullopt;
  }

  // Scans an interpolation body up to and including its closing brace.
  std::optional<std::size_t> scan_interpolation(std::size_t p) const {
    int depth = 1;
    while (p < src_.size()) {
      char c = src_[p];
      if (c == '"') {
        auto after = scan_quoted(p + 1);
        if (!after) return std::nullopt;
        p = *after;
        continue;
      }
      if (c == '{') {
        ++depth;
      } else if (c == '}') {
        if (--depth == 0) return p + 1;
      }
      ++p;
    }
    return std::nullopt;
  }

  Token next() {
    SourceSpan start = here();
    char c = peek();
    auto uc = static_cast<unsigned char>(c);

    if (c == '\n') {
      advance(1);
      return make(TokenKind::Newline, start);
    }
    if (c == '\r' && peek(1) == '\n') {
      advance(2);
      return make(TokenKind::Newline, start);
    }
    if (c == '#' || (c == '/' && peek(1) == '/')) {
      advance(line_end(pos_) - pos_);
      return make(TokenKind::Comment, start);
    }
    if (c == '/' && peek(1) == '*') {
      std::size_t close = src_.find("*/", pos_ + 2);
      if (close == std::string_view::npos) {
        advance(src_.size() - pos_);
        return error(start, "unterminated block comment");
      }
      advance(close + 2 - pos_);
      return make(TokenKind::Comment, start);
    }
    if (c == '"') {
      if (auto end = scan_quoted(pos_ + 1)) {
        advance(*end - pos_);
        return make(TokenKind::String, start);
      }
      advance(line_end(pos_) - pos_);
      return error(start, "unterminated string literal");
    }
    if (c == '<' && peek(1) == '<') {
      if (auto tok = heredoc(start)) return std::move(*tok);
    }
    if (is_digit(uc)) {
      number();
      return make(TokenKind::Number, start);
    }
    if (is_ident_start(uc)) {
      std::size_t p = pos_;
      while (p < src_.size() && is_ident_char(static_cast<unsigned char>(src_[p]))) ++p;
      std::string_view word = src_.substr(pos_, p - pos_);
      advance(p - pos_);
      bool boolean = word == "true" || word == "false";
      return make(boolean ? TokenKind::Bool : TokenKind::Identifier, start);
    }
    if (c == '{') {
      advance(1);
      return make(TokenKind::BlockOpen, start);
    }
    if (c == '}') {
      advance(1);
      return make(TokenKind::BlockClose, start);
    }
    for (std::string_view op : {"...", "==", "!=", "<=", ">=", "&&", "||", "=>"}) {
      if (src_.substr(pos_).starts_with(op)) {
        advance(op.size());
        return make(TokenKind::Punctuation, start);
      }
    }
    if (c == '=') {
      advance(1);
      return make(TokenKind::Assign, start);
    }
    if (std::string_view("()[],.:?!<>+-*/%").find(c) != std::string_view::npos) {
      advance(1);
      return make(TokenKind::Punctuation, start);
    }
    advance(1);
    return error(start, std::string("unexpected character '") + c + "'");
  }

  void number() {
    std::size_t p = pos_;
    while (p < src_.size() && is_digit(static_cast<unsigned char>(src_[p]))) ++p;
    if (p + 1 < src_.size() && src_[p] == '.' && is_digit(static_cast<unsigned char>(src_[p + 1]))) {
      ++p;
      while (p < src_.size() && is_digit(static_cast<unsigned char>(src_[p]))) ++p;
    }
    if (p < src_.size() && (src_[p] == 'e' || src_[p] == 'E')) {
      std::size_t q = p + 1;
      if (q < src_.size() && (src_[q] == '+' || src_[q] == '-')) ++q;
      if (q < src_.size() && is_digit(static_cast<unsigned char>(src_[q]))) {
        while (q < src_.size() && is_digit(static_cast<unsigned char>(src_[q]))) ++q;
        p = q;
      }
    }
    advance(p - pos_);
  }

  std::optional<Token> heredoc(const SourceSpan& start) {
    std::size_t p = pos_ + 2;
    if (p < src_.size() && src_[p] == '-') ++p;
    std::size_t marker_begin = p;
    while (p < src_.size() && is_ident_char(static_cast<unsigned char>(src_[p]))) ++p;
    if (p == marker_begin) return std::nullopt;
    std::string_view marker = src_.substr(marker_begin, p - marker_begin);
    if (p < src_.size() && src_[p] == '\r') ++p;
    if (p >= src_.size() || src_[p] != '\n') return std::nullopt;

    std::size_t line_begin = p + 1;
    while (line_begin <= src_.size()) {
      std::size_t nl = src_.find('\n', line_begin);
      std::size_t stop = nl == std::string_view::npos ? src_.size() : nl;
      std::string_view line = src_.substr(line_begin, stop - line_begin);
      if (line.ends_with('\r')) line.remove_suffix(1);
      std::size_t indent = line.find_first_not_of(" \t");
      if (indent != std::string_view::npos && line.substr(indent) == marker) {
        advance(line_begin + indent + marker.size() - pos_);
        return make(TokenKind::Heredoc, start);
      }
      if (nl == std::string_view::npos) break;
      line_begin = nl + 1;
    }
    advance(src_.size() - pos_);
    return error(start, "unterminated heredoc '" + std::string(marker) + "'");
  }
};

}  // namespace

std::vector<Token> tokenize(std::string_view text, std::uint32_t file_id) {
  return Lexer(text, file_id).run();
}

std::string detokenize(const std::vector<Token>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    out += t.leading;
    out += t.text;
  }
  return out;
}

}  // namespace tfsmell::hcl
