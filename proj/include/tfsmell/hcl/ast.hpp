#pragma once

#include "tfsmell/hcl/lexer.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tfsmell::hcl {

enum class ValueKind : std::uint8_t {
  String,
  Number,
  Bool,
  List,
  Map,
  Reference,
  Template,
  Opaque,
};

std::string_view to_string(ValueKind kind);

struct MapEntry;

/// One piece of a template string: literal text, a plain reference such as
/// `${var.region}`, or any other interpolation kept verbatim.
struct TemplatePart {
  enum class Kind : std::uint8_t { Literal, Reference, Expression };
  Kind kind = Kind::Literal;
  std::string text;
  std::vector<std::string> path;
};

/// The subset of HCL expressions the detectors care about. Anything else
/// (function calls, operators, conditionals, for-expressions) is `Opaque`
/// and keeps its source text verbatim.
struct Expression {
  ValueKind kind = ValueKind::Opaque;
  // String: unescaped value. Number: source spelling. Opaque: verbatim text.
  std::string text;
  double number = 0.0;
  bool boolean = false;
  std::vector<Expression> items;
  std::vector<MapEntry> entries;
  std::vector<std::string> path;
  std::vector<TemplatePart> parts;
  SourceSpan span;

  bool is_string() const { return kind == ValueKind::String; }
  bool is_number() const { return kind == ValueKind::Number; }

  /// Looks up a map entry; the last duplicate key wins.
  const Expression* find(std::string_view key) const;
};

struct MapEntry {
  std::string key;
  Expression value;
};

struct Attribute {
  std::string name;
  Expression value;
  SourceSpan span;
};

struct Node;

struct Block {
  std::string block_type;
  std::vector<std::string> labels;
  std::vector<Node> body;
  SourceSpan span;
  // Span of the header (type and labels) up to and including `{`.
  SourceSpan header;
};

struct Node : std::variant<Attribute, Block> {
  using variant::variant;

  const Attribute* attribute() const { return std::get_if<Attribute>(this); }
  const Block* block() const { return std::get_if<Block>(this); }
  const SourceSpan& span() const;
};

enum class Severity : std::uint8_t { Warning, Error };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string message;
  SourceSpan span;
};

struct ConfigFile {
  std::string path;
  std::string source;
  std::vector<Node> body;
  std::vector<Diagnostic> diagnostics;
  // Comment text keyed by the line it starts on. Not part of the tree.
  std::map<std::uint32_t, std::vector<std::string>> comments;

  bool has_errors() const;
  /// Span covering the whole source text.
  SourceSpan whole_span() const;
};

struct BlockQuery {
  std::string_view block_type;
  // Leading labels that must match, e.g. {"aws_instance"} for all instances.
  std::vector<std::string> label_filter;
  bool recursive = false;
};

std::vector<const Block*> find_blocks(const ConfigFile& file, const BlockQuery& query);
std::vector<const Block*> find_blocks(const Block& block, const BlockQuery& query);

inline std::vector<const Block*> find_blocks(const ConfigFile& file, std::string_view type,
                                             bool recursive = false) {
  return find_blocks(file, BlockQuery{type, {}, recursive});
}

/// Value of the attribute `name` directly inside `block`. When the name is
/// assigned more than once the last assignment is returned.
const Expression* get_attribute(const Block& block, std::string_view name);

/// Block bodies and expressions compared without regard to source positions.
bool same_structure(const Expression& a, const Expression& b);
bool same_structure(const Node& a, const Node& b);
bool same_structure(const std::vector<Node>& a, const std::vector<Node>& b);

/// Dotted form of a reference path, e.g. "aws_instance.web.id".
std::string join_path(const std::vector<std::string>& path);

}  // namespace tfsmell::hcl
