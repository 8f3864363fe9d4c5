#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tfsmell {

/// Identifier of a sustainability smell ("SS1".."SS7" for the built-in set).
/// External catalogs may add further numbers.
struct SmellId {
  std::uint16_t number = 0;

  friend auto operator<=>(const SmellId&, const SmellId&) = default;
};

inline constexpr SmellId SS1{1};
inline constexpr SmellId SS2{2};
inline constexpr SmellId SS3{3};
inline constexpr SmellId SS4{4};
inline constexpr SmellId SS5{5};
inline constexpr SmellId SS6{6};
inline constexpr SmellId SS7{7};
inline constexpr std::array<SmellId, 7> kBuiltinSmells{SS1, SS2, SS3, SS4, SS5, SS6, SS7};

std::string to_string(SmellId id);
std::optional<SmellId> parse_smell_id(std::string_view text);

struct AttributeVector {
  bool runtime_dependency = false;
  bool resource_context = false;
  bool code_dependency = false;
  bool inherent_badness = false;

  friend bool operator==(const AttributeVector&, const AttributeVector&) = default;
};

enum class Category : std::uint8_t { General = 1, Demand = 2, Application = 3 };

std::string_view category_name(int category);

struct SmellDescriptor {
  SmellId id;
  std::string name;
  int category = 0;
  AttributeVector attributes;
  std::string summary;
  std::string remediation;
};

struct Catalog {
  std::string version;
  std::vector<SmellDescriptor> smells;

  const SmellDescriptor* find(SmellId id) const;
};

/// The seven built-in smells, ordered SS1..SS7.
const Catalog& builtin_catalog();

/// Shorthand for builtin_catalog().smells.
const std::vector<SmellDescriptor>& catalog();

/// Loads a catalog from JSON: either an array of smell objects or
/// {"version": ..., "smells": [...]}. Each smell has id, name,
/// attributes (4 booleans), summary and remediation. Categories are assigned
/// by clustering the attribute vectors. Throws std::runtime_error.
Catalog load_catalog(std::string_view json_text);
Catalog load_catalog_file(const std::string& path);

/// 1 when the two vectors are identical, 0 otherwise.
int similarity(const AttributeVector& a, const AttributeVector& b);

struct SimilarityMatrix {
  std::vector<SmellId> ids;
  std::vector<int> entries;  // row-major, ids.size() squared

  std::size_t size() const { return ids.size(); }
  int at(std::size_t row, std::size_t col) const { return entries[row * ids.size() + col]; }
};

SimilarityMatrix similarity_matrix(const std::vector<SmellDescriptor>& smells);

}  // namespace tfsmell
