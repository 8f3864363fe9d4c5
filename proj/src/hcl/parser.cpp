#include "tfsmell/hcl/parser.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <functional>
#include <optional>
#include <set>
#include <utility>

namespace tfsmell::hcl {

namespace {

struct ParseError {
  std::string message;
  SourceSpan span;
  // Lexical errors are recorded when tokenizing.
  bool reported = false;
};

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

bool is_punct(const Token& t, std::string_view p) {
  return t.kind == TokenKind::Punctuation && t.text == p;
}

// Parses a reference (`a.b[0].c`) starting at `i`. Returns the path and the
// index one past it, or nullopt when the identifier is a function call.
std::optional<std::pair<std::vector<std::string>, std::size_t>> reference_at(
    const std::vector<Token>& toks, std::size_t i, std::size_t end) {
  if (i >= end || toks[i].kind != TokenKind::Identifier) return std::nullopt;
  std::vector<std::string> path{toks[i].text};
  ++i;
  while (i < end) {
    if (is_punct(toks[i], "(")) return std::nullopt;
    if (is_punct(toks[i], ".") && i + 1 < end) {
      const Token& seg = toks[i + 1];
      if (seg.kind == TokenKind::Identifier || seg.kind == TokenKind::Number ||
          seg.kind == TokenKind::Bool) {
        path.push_back(seg.text);
        i += 2;
        continue;
      }
      if (is_punct(seg, "*")) {
        path.emplace_back("*");
        i += 2;
        continue;
      }
      break;
    }
    if (is_punct(toks[i], "[") && i + 2 < end && is_punct(toks[i + 2], "]")) {
      const Token& key = toks[i + 1];
      if (key.kind == TokenKind::Number || key.kind == TokenKind::String || is_punct(key, "*")) {
        path.push_back("[" + key.text + "]");
        i += 3;
        continue;
      }
    }
    break;
  }
  return std::make_pair(std::move(path), i);
}

std::optional<std::vector<std::string>> as_reference(std::string_view text) {
  auto toks = tokenize(text);
  std::vector<Token> sig;
  for (auto& t : toks) {
    if (t.kind != TokenKind::Newline && t.kind != TokenKind::Comment) sig.push_back(std::move(t));
  }
  if (sig.size() < 2) return std::nullopt;
  std::size_t end = sig.size() - 1;  // drop eof
  auto ref = reference_at(sig, 0, end);
  if (!ref || ref->second != end) return std::nullopt;
  if (ref->first.size() == 1 && ref->first[0] == "null") return std::nullopt;
  return std::move(ref->first);
}

// Finds the end of an interpolation body starting after `${`.
std::size_t interpolation_end(std::string_view s, std::size_t p) {
  int depth = 1;
  bool in_string = false;
  while (p < s.size()) {
    char c = s[p];
    if (in_string) {
      if (c == '\\') {
        p += 2;
        continue;
      }
      if (c == '"') in_string = false;
    } else if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return p;
    }
    ++p;
  }
  return std::string_view::npos;
}

Expression decode_template(std::string_view body, bool process_escapes) {
  std::vector<TemplatePart> parts;
  std::string literal;
  bool interpolated = false;
  auto flush = [&] {
    if (!literal.empty()) {
      parts.push_back({TemplatePart::Kind::Literal, std::move(literal), {}});
      literal.clear();
    }
  };
  for (std::size_t p = 0; p < body.size();) {
    char c = body[p];
    if (process_escapes && c == '\\' && p + 1 < body.size()) {
      char e = body[p + 1];
      p += 2;
      switch (e) {
        case 'n': literal += '\n'; break;
        case 't': literal += '\t'; break;
        case 'r': literal += '\r'; break;
        case '"': literal += '"'; break;
        case '\\': literal += '\\'; break;
        case 'u':
        case 'U': {
          std::size_t width = e == 'u' ? 4 : 8;
          std::uint32_t cp = 0;
          auto digits = body.substr(p, width);
          auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), cp, 16);
          if (ec == std::errc() && ptr == digits.data() + digits.size() && digits.size() == width) {
            append_utf8(literal, cp);
            p += width;
          } else {
            literal += '\\';
            literal += e;
          }
          break;
        }
        default:
          literal += '\\';
          literal += e;
      }
      continue;
    }
    if ((c == '$' || c == '%') && p + 2 < body.size() && body[p + 1] == c && body[p + 2] == '{') {
      literal += c;
      literal += '{';
      p += 3;
      continue;
    }
    if ((c == '$' || c == '%') && p + 1 < body.size() && body[p + 1] == '{') {
      std::size_t close = interpolation_end(body, p + 2);
      if (close == std::string_view::npos) {
        literal.append(body.substr(p));
        break;
      }
      flush();
      interpolated = true;
      std::string_view inner = body.substr(p + 2, close - p - 2);
      if (inner.starts_with('~')) inner.remove_prefix(1);
      if (inner.ends_with('~')) inner.remove_suffix(1);
      auto first = inner.find_first_not_of(" \t\r\n");
      auto last = inner.find_last_not_of(" \t\r\n");
      inner = first == std::string_view::npos ? std::string_view{} : inner.substr(first, last - first + 1);
      TemplatePart part;
      part.text = std::string(inner);
      if (c == '$') {
        if (auto path = as_reference(inner)) {
          part.kind = TemplatePart::Kind::Reference;
          part.path = std::move(*path);
        } else {
          part.kind = TemplatePart::Kind::Expression;
        }
      } else {
        part.kind = TemplatePart::Kind::Expression;
      }
      parts.push_back(std::move(part));
      p = close + 1;
      continue;
    }
    literal += c;
    ++p;
  }
  Expression e;
  if (!interpolated) {
    e.kind = ValueKind::String;
    e.text = std::move(literal);
    return e;
  }
  flush();
  e.kind = ValueKind::Template;
  e.parts = std::move(parts);
  return e;
}

Expression decode_heredoc(std::string_view raw) {
  // raw = "<<[-]MARKER\n ... \n  MARKER"
  bool indented = raw.size() > 2 && raw[2] == '-';
  std::size_t first_nl = raw.find('\n');
  std::size_t last_nl = raw.rfind('\n');
  std::string_view content;
  if (first_nl != last_nl) content = raw.substr(first_nl + 1, last_nl - first_nl);
  std::string text;
  if (indented) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < content.size()) {
      std::size_t nl = content.find('\n', start);
      std::size_t stop = nl == std::string_view::npos ? content.size() : nl + 1;
      lines.push_back(content.substr(start, stop - start));
      start = stop;
    }
    std::size_t common = std::string_view::npos;
    for (auto line : lines) {
      auto indent = line.find_first_not_of(" \t");
      if (indent == std::string_view::npos || line[indent] == '\n' || line[indent] == '\r') continue;
      common = std::min(common, indent);
    }
    if (common == std::string_view::npos) common = 0;
    for (auto line : lines) {
      auto indent = line.find_first_not_of(" \t");
      text.append(line.substr(std::min({common, indent, line.size()})));
    }
  } else {
    text = std::string(content);
  }
  return decode_template(text, false);
}

class Parser {
 public:
  Parser(std::string_view text, ConfigFile& file, std::uint32_t file_id)
      : src_(text), file_(file) {
    for (auto& t : tokenize(text, file_id)) {
      if (t.kind == TokenKind::Comment) {
        file_.comments[t.span.start_line].push_back(t.text);
        continue;
      }
      if (t.kind == TokenKind::Error) {
        file_.diagnostics.push_back({Severity::Error, t.error, t.span});
      }
      toks_.push_back(std::move(t));
    }
  }

  void run() {
    while (true) {
      skip_newlines();
      if (at(TokenKind::Eof)) break;
      std::size_t item_start = pos_;
      try {
        Node node = item(true);
        check_terminated_after_item();
        file_.body.push_back(std::move(node));
      } catch (const ParseError& e) {
        if (!e.reported) file_.diagnostics.push_back({Severity::Error, e.message, e.span});
        recover(item_start);
      }
    }
    check_duplicates(file_.body);
  }

 private:
  std::string_view src_;
  ConfigFile& file_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  const Token& cur() const { return toks_[pos_]; }
  bool at(TokenKind k) const { return cur().kind == k; }

  [[noreturn]] void fail(const std::string& message, const Token& t) const {
    if (t.kind == TokenKind::Error) throw ParseError{t.error, t.span, true};
    throw ParseError{message, t.span};
  }

  void skip_newlines() {
    while (at(TokenKind::Newline)) ++pos_;
  }

  void recover(std::size_t item_start) {
    pos_ = item_start + 1;
    while (!at(TokenKind::Eof)) {
      const Token& prev = toks_[pos_ - 1];
      if (cur().kind == TokenKind::Identifier && cur().span.start_col == 1 &&
          prev.kind == TokenKind::Newline) {
        return;
      }
      ++pos_;
    }
  }

  void check_terminated_after_item() {
    if (at(TokenKind::Newline) || at(TokenKind::Eof)) return;
    fail("expected newline after " + std::string(to_string(toks_[pos_ - 1].kind)), cur());
  }

  std::string label_text(const Token& t) {
    if (t.kind == TokenKind::Identifier) return t.text;
    Expression e = decode_template(std::string_view(t.text).substr(1, t.text.size() - 2), true);
    if (e.kind != ValueKind::String) fail("block labels cannot contain interpolations", t);
    return e.text;
  }

  Node item(bool top_level) {
    if (!at(TokenKind::Identifier)) fail("expected an attribute or block", cur());
    const Token& name = cur();
    ++pos_;
    if (at(TokenKind::Assign)) {
      ++pos_;
      Attribute attr;
      attr.name = name.text;
      attr.value = expression([](const Token&) { return false; });
      attr.span = cover(name.span, attr.value.span);
      if (!at(TokenKind::Newline) && !at(TokenKind::Eof) && !at(TokenKind::BlockClose)) {
        fail("unexpected token after attribute value", cur());
      }
      return attr;
    }
    Block block;
    block.block_type = name.text;
    while (at(TokenKind::String) || at(TokenKind::Identifier)) {
      block.labels.push_back(label_text(cur()));
      ++pos_;
    }
    if (!at(TokenKind::BlockOpen)) fail("expected '=' or '{' after '" + name.text + "'", cur());
    block.header = cover(name.span, cur().span);
    ++pos_;
    while (true) {
      skip_newlines();
      if (at(TokenKind::BlockClose)) break;
      if (at(TokenKind::Eof)) fail("unclosed block '" + name.text + "'", name);
      block.body.push_back(item(false));
      if (!at(TokenKind::BlockClose)) check_terminated_after_item();
    }
    block.span = cover(name.span, cur().span);
    ++pos_;
    check_labels(block, top_level);
    check_duplicates(block.body);
    return block;
  }

  void check_labels(const Block& b, bool top_level) {
    auto warn = [&](std::size_t expected) {
      if (b.labels.size() != expected) {
        file_.diagnostics.push_back(
            {Severity::Warning,
             "'" + b.block_type + "' block expects " + std::to_string(expected) + " label(s), found " +
                 std::to_string(b.labels.size()),
             b.header});
      }
    };
    if (top_level && b.block_type == "resource") warn(2);
    if (top_level && b.block_type == "terraform") warn(0);
    if (b.block_type == "backend") warn(1);
  }

  void check_duplicates(const std::vector<Node>& body) {
    std::set<std::string_view> seen;
    for (const auto& n : body) {
      const Attribute* a = n.attribute();
      if (a && !seen.insert(a->name).second) {
        file_.diagnostics.push_back(
            {Severity::Warning, "duplicate attribute '" + a->name + "'; the last assignment wins", a->span});
      }
    }
  }

  // Index one past the expression starting at pos_. Stops at depth 0 on
  // newline, comma, a closing bracket or anything `extra_stop` accepts.
  std::size_t extent(const std::function<bool(const Token&)>& extra_stop) const {
    auto operand = [](const Token& t) {
      return t.kind == TokenKind::Identifier || t.kind == TokenKind::String || t.kind == TokenKind::Number ||
             t.kind == TokenKind::Bool || t.kind == TokenKind::Heredoc;
    };
    int depth = 0;
    std::size_t i = pos_;
    for (; i < toks_.size(); ++i) {
      const Token& t = toks_[i];
      if (t.kind == TokenKind::Eof) break;
      if (t.kind == TokenKind::Error) fail("", t);
      bool open = t.kind == TokenKind::BlockOpen || is_punct(t, "(") || is_punct(t, "[");
      bool close = t.kind == TokenKind::BlockClose || is_punct(t, ")") || is_punct(t, "]");
      if (depth == 0) {
        if (close || t.kind == TokenKind::Newline || is_punct(t, ",") || extra_stop(t)) break;
        // Outside brackets '=' only separates a name from its value, and two
        // operands always need an operator between them.
        if (t.kind == TokenKind::Assign) fail("unexpected '='", t);
        if (i > pos_ && operand(t) && operand(toks_[i - 1])) fail("expected an operator", t);
      }
      if (open) ++depth;
      if (close) --depth;
    }
    return i;
  }

  Expression expression(const std::function<bool(const Token&)>& extra_stop) {
    std::size_t begin = pos_;
    std::size_t end = extent(extra_stop);
    if (end == begin) fail("expected an expression", cur());
    Expression e;
    std::size_t stop = begin;
    if (auto term = structured(begin, end, stop); term && stop == end) {
      e = std::move(*term);
    } else {
      e.kind = ValueKind::Opaque;
      e.text = std::string(src_.substr(toks_[begin].span.begin, toks_[end - 1].span.end - toks_[begin].span.begin));
    }
    e.span = cover(toks_[begin].span, toks_[end - 1].span);
    pos_ = end;
    return e;
  }

  std::optional<Expression> structured(std::size_t i, std::size_t end, std::size_t& stop) {
    const Token& t = toks_[i];
    Expression e;
    switch (t.kind) {
      case TokenKind::String:
        e = decode_template(std::string_view(t.text).substr(1, t.text.size() - 2), true);
        stop = i + 1;
        return e;
      case TokenKind::Heredoc:
        e = decode_heredoc(t.text);
        stop = i + 1;
        return e;
      case TokenKind::Number:
        e.kind = ValueKind::Number;
        e.text = t.text;
        e.number = std::strtod(t.text.c_str(), nullptr);
        stop = i + 1;
        return e;
      case TokenKind::Bool:
        e.kind = ValueKind::Bool;
        e.boolean = t.text == "true";
        stop = i + 1;
        return e;
      case TokenKind::Identifier: {
        if (t.text == "null") return std::nullopt;
        auto ref = reference_at(toks_, i, end);
        if (!ref) return std::nullopt;
        e.kind = ValueKind::Reference;
        e.path = std::move(ref->first);
        stop = ref->second;
        return e;
      }
      case TokenKind::BlockOpen:
        return collection(i, false, stop);
      case TokenKind::Punctuation:
        if (t.text == "[") return collection(i, true, stop);
        return std::nullopt;
      default:
        return std::nullopt;
    }
  }

  std::optional<Expression> collection(std::size_t open, bool list, std::size_t& stop) {
    std::size_t saved = pos_;
    pos_ = open + 1;
    auto restore = [&] { pos_ = saved; };
    auto closes = [&] { return list ? is_punct(cur(), "]") : at(TokenKind::BlockClose); };
    if (at(TokenKind::Identifier) && cur().text == "for") {
      restore();
      return std::nullopt;
    }
    Expression e;
    e.kind = list ? ValueKind::List : ValueKind::Map;
    while (true) {
      skip_newlines();
      if (closes()) break;
      if (at(TokenKind::Eof)) {
        restore();
        return std::nullopt;
      }
      if (list) {
        e.items.push_back(expression([](const Token&) { return false; }));
      } else {
        std::string key;
        if (at(TokenKind::Identifier) || at(TokenKind::Number) || at(TokenKind::Bool)) {
          key = cur().text;
        } else if (at(TokenKind::String)) {
          Expression k = decode_template(std::string_view(cur().text).substr(1, cur().text.size() - 2), true);
          if (k.kind != ValueKind::String) {
            restore();
            return std::nullopt;
          }
          key = k.text;
        } else {
          restore();
          return std::nullopt;
        }
        ++pos_;
        if (!at(TokenKind::Assign) && !is_punct(cur(), ":")) {
          restore();
          return std::nullopt;
        }
        ++pos_;
        e.entries.push_back({std::move(key), expression([](const Token&) { return false; })});
      }
      if (is_punct(cur(), ",")) {
        ++pos_;
      } else if (!at(TokenKind::Newline) && !closes()) {
        restore();
        return std::nullopt;
      }
    }
    stop = pos_ + 1;
    restore();
    return e;
  }
};

}  // namespace

Expression parse_string_content(std::string_view body) { return decode_template(body, true); }

ConfigFile parse(std::string_view text, std::string path, std::uint32_t file_id) {
  ConfigFile file;
  file.path = std::move(path);
  file.source = std::string(text);
  Parser parser(text, file, file_id);
  parser.run();
  return file;
}

}  // namespace tfsmell::hcl
