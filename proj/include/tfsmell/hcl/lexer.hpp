#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tfsmell::hcl {

/// A region of one source file. Lines and columns are 1-based and count
/// characters (UTF-8 code points), not bytes. The end position is exclusive.
/// `begin`/`end` are the matching byte offsets into the original text.
struct SourceSpan {
  std::uint32_t file_id = 0;
  std::uint32_t start_line = 1;
  std::uint32_t start_col = 1;
  std::uint32_t end_line = 1;
  std::uint32_t end_col = 1;
  std::size_t begin = 0;
  std::size_t end = 0;

  bool contains(const SourceSpan& other) const {
    return begin <= other.begin && other.end <= end;
  }

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

/// Joins two spans of the same file into the smallest span covering both.
SourceSpan cover(const SourceSpan& first, const SourceSpan& last);

enum class TokenKind : std::uint8_t {
  Identifier,
  String,
  Number,
  Bool,
  Punctuation,
  BlockOpen,
  BlockClose,
  Assign,
  Heredoc,
  Comment,
  Newline,
  Eof,
  Error,
};

std::string_view to_string(TokenKind kind);

struct Token {
  TokenKind kind = TokenKind::Eof;
  std::string text;
  SourceSpan span;
  // Whitespace (and a leading byte-order mark) that precedes `text`.
  std::string leading;
  // Only set on Error tokens.
  std::string error;
};

/// Splits `text` into tokens. The result always ends with an Eof token.
/// Malformed input (unterminated strings, heredocs, block comments, stray
/// characters) produces Error tokens and lexing carries on.
std::vector<Token> tokenize(std::string_view text, std::uint32_t file_id = 0);

/// Inverse of tokenize: concatenates leading whitespace and token text.
std::string detokenize(const std::vector<Token>& tokens);

}  // namespace tfsmell::hcl
