#include "tfsmell/hcl/ast.hpp"

#include <algorithm>

namespace tfsmell::hcl {

std::string_view to_string(ValueKind kind) {
  switch (kind) {
    case ValueKind::String: return "string";
    case ValueKind::Number: return "number";
    case ValueKind::Bool: return "bool";
    case ValueKind::List: return "list";
    case ValueKind::Map: return "map";
    case ValueKind::Reference: return "reference";
    case ValueKind::Template: return "template";
    case ValueKind::Opaque: return "opaque";
  }
  return "unknown";
}

const Expression* Expression::find(std::string_view key) const {
  const Expression* found = nullptr;
  for (const auto& e : entries) {
    if (e.key == key) found = &e.value;
  }
  return found;
}

const SourceSpan& Node::span() const {
  if (const auto* a = attribute()) return a->span;
  return block()->span;
}

bool ConfigFile::has_errors() const {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

SourceSpan ConfigFile::whole_span() const {
  SourceSpan s;
  s.begin = 0;
  s.end = source.size();
  std::size_t start = source.starts_with("\xEF\xBB\xBF") ? 3 : 0;
  for (std::size_t i = start; i < source.size(); ++i) {
    auto c = static_cast<unsigned char>(source[i]);
    if (c == '\n') {
      ++s.end_line;
      s.end_col = 1;
    } else if ((c & 0xC0) != 0x80) {
      ++s.end_col;
    }
  }
  return s;
}

namespace {

bool labels_match(const Block& b, const BlockQuery& q) {
  if (b.block_type != q.block_type) return false;
  if (q.label_filter.size() > b.labels.size()) return false;
  return std::equal(q.label_filter.begin(), q.label_filter.end(), b.labels.begin());
}

void collect(const std::vector<Node>& body, const BlockQuery& q,
             std::vector<const Block*>& out) {
  for (const auto& node : body) {
    const Block* b = node.block();
    if (!b) continue;
    if (labels_match(*b, q)) out.push_back(b);
    if (q.recursive) collect(b->body, q, out);
  }
}

}  // namespace

std::vector<const Block*> find_blocks(const ConfigFile& file, const BlockQuery& query) {
  std::vector<const Block*> out;
  collect(file.body, query, out);
  return out;
}

std::vector<const Block*> find_blocks(const Block& block, const BlockQuery& query) {
  std::vector<const Block*> out;
  collect(block.body, query, out);
  return out;
}

const Expression* get_attribute(const Block& block, std::string_view name) {
  const Expression* found = nullptr;
  for (const auto& node : block.body) {
    if (const auto* a = node.attribute(); a && a->name == name) found = &a->value;
  }
  return found;
}

bool same_structure(const Expression& a, const Expression& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ValueKind::String:
    case ValueKind::Number:
      return a.text == b.text;
    case ValueKind::Opaque:
      return a.text == b.text;
    case ValueKind::Bool:
      return a.boolean == b.boolean;
    case ValueKind::Reference:
      return a.path == b.path;
    case ValueKind::List:
      return std::equal(a.items.begin(), a.items.end(), b.items.begin(), b.items.end(),
                        [](const Expression& x, const Expression& y) { return same_structure(x, y); });
    case ValueKind::Map:
      return std::equal(a.entries.begin(), a.entries.end(), b.entries.begin(), b.entries.end(),
                        [](const MapEntry& x, const MapEntry& y) {
                          return x.key == y.key && same_structure(x.value, y.value);
                        });
    case ValueKind::Template:
      return std::equal(a.parts.begin(), a.parts.end(), b.parts.begin(), b.parts.end(),
                        [](const TemplatePart& x, const TemplatePart& y) {
                          return x.kind == y.kind && x.text == y.text && x.path == y.path;
                        });
  }
  return false;
}

bool same_structure(const Node& a, const Node& b) {
  if (a.index() != b.index()) return false;
  if (const auto* x = a.attribute()) {
    const auto* y = b.attribute();
    return x->name == y->name && same_structure(x->value, y->value);
  }
  const Block* x = a.block();
  const Block* y = b.block();
  return x->block_type == y->block_type && x->labels == y->labels &&
         same_structure(x->body, y->body);
}

bool same_structure(const std::vector<Node>& a, const std::vector<Node>& b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(),
                    [](const Node& x, const Node& y) { return same_structure(x, y); });
}

std::string join_path(const std::vector<std::string>& path) {
  std::string out;
  for (const auto& seg : path) {
    if (!out.empty() && !seg.starts_with('[')) out += '.';
    out += seg;
  }
  return out;
}

}  // namespace tfsmell::hcl
