#include "tfsmell/catalog.hpp"

#include "tfsmell/clustering.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tfsmell {

std::string to_string(SmellId id) { return "SS" + std::to_string(id.number); }

std::optional<SmellId> parse_smell_id(std::string_view text) {
  if (!text.starts_with("SS") || text.size() < 3) return std::nullopt;
  std::uint16_t n = 0;
  auto digits = text.substr(2);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || n == 0) return std::nullopt;
  return SmellId{n};
}

std::string_view category_name(int category) {
  switch (category) {
    case 1: return "General";
    case 2: return "Demand";
    case 3: return "Application";
    default: return "Other";
  }
}

const SmellDescriptor* Catalog::find(SmellId id) const {
  for (const auto& s : smells) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

const Catalog& builtin_catalog() {
  static const Catalog kCatalog{
      "2024.1",
      {
          {SS1, "Over-Provisioning Resources", 2, {true, true, false, false},
           "Compute is sized well beyond what the workload needs, leaving capacity idle.",
           "Review observed utilisation and move to the smallest size that meets demand."},
          {SS2, "Lack of Auto-Scaling", 2, {true, true, false, false},
           "A fixed instance count is provisioned regardless of how demand changes.",
           "Put the instances behind an autoscaling group or policy driven by load."},
          {SS3, "Ignoring Resource Lifecycles", 1, {false, false, false, true},
           "Stateful resources are declared without any lifecycle policy.",
           "Add a lifecycle block (create_before_destroy, prevent_destroy) to control replacement."},
          {SS4, "Excessive Logging", 1, {false, false, false, true},
           "Logs are kept for very long periods or forever by default.",
           "Set a retention period that matches how long the logs are actually used."},
          {SS5, "Unoptimized Data Transfers", 3, {false, false, true, false},
           "Resources that talk to each other are placed in different regions.",
           "Place resources that exchange data frequently in the same region."},
          {SS6, "State Management", 1, {false, false, false, true},
           "Terraform state is kept locally instead of in a shared remote backend.",
           "Configure a remote backend so state is shared, locked and versioned."},
          {SS7, "Monolithic Infrastructure", 1, {false, false, false, true},
           "Many resources are declared together in a single file.",
           "Split the configuration into smaller modules grouped by concern."},
      }};
  return kCatalog;
}

const std::vector<SmellDescriptor>& catalog() { return builtin_catalog().smells; }

int similarity(const AttributeVector& a, const AttributeVector& b) { return a == b ? 1 : 0; }

SimilarityMatrix similarity_matrix(const std::vector<SmellDescriptor>& smells) {
  SimilarityMatrix m;
  for (const auto& s : smells) m.ids.push_back(s.id);
  m.entries.reserve(smells.size() * smells.size());
  for (const auto& a : smells) {
    for (const auto& b : smells) m.entries.push_back(similarity(a.attributes, b.attributes));
  }
  return m;
}

namespace {

std::string require_string(const nlohmann::json& obj, const char* key, std::size_t index) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw std::runtime_error("catalog entry " + std::to_string(index) + ": missing string field '" + key + "'");
  }
  return it->get<std::string>();
}

}  // namespace

Catalog load_catalog(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("catalog is not valid JSON: ") + e.what());
  }
  Catalog out;
  const nlohmann::json* list = &doc;
  if (doc.is_object()) {
    if (auto v = doc.find("version"); v != doc.end() && v->is_string()) out.version = v->get<std::string>();
    auto s = doc.find("smells");
    if (s == doc.end()) throw std::runtime_error("catalog object has no 'smells' array");
    list = &*s;
  }
  if (!list->is_array()) throw std::runtime_error("catalog smells must be an array");
  if (out.version.empty()) out.version = "custom";

  std::set<SmellId> seen;
  for (std::size_t i = 0; i < list->size(); ++i) {
    const auto& item = (*list)[i];
    if (!item.is_object()) throw std::runtime_error("catalog entry " + std::to_string(i) + " is not an object");
    for (const auto& [key, value] : item.items()) {
      static const std::set<std::string> kKnown{"id", "name", "attributes", "summary", "remediation"};
      if (!kKnown.contains(key)) {
        throw std::runtime_error("catalog entry " + std::to_string(i) + ": unknown field '" + key + "'");
      }
    }
    SmellDescriptor d;
    std::string id = require_string(item, "id", i);
    auto parsed = parse_smell_id(id);
    if (!parsed) throw std::runtime_error("catalog entry " + std::to_string(i) + ": bad id '" + id + "'");
    if (!seen.insert(*parsed).second) throw std::runtime_error("duplicate catalog id '" + id + "'");
    d.id = *parsed;
    d.name = require_string(item, "name", i);
    d.summary = require_string(item, "summary", i);
    d.remediation = require_string(item, "remediation", i);
    auto attrs = item.find("attributes");
    if (attrs == item.end() || !attrs->is_array() || attrs->size() != 4 ||
        !std::all_of(attrs->begin(), attrs->end(), [](const auto& b) { return b.is_boolean(); })) {
      throw std::runtime_error("catalog entry " + std::to_string(i) + ": 'attributes' must be 4 booleans");
    }
    d.attributes = {(*attrs)[0].get<bool>(), (*attrs)[1].get<bool>(), (*attrs)[2].get<bool>(),
                    (*attrs)[3].get<bool>()};
    out.smells.push_back(std::move(d));
  }
  if (out.smells.empty()) throw std::runtime_error("catalog is empty");

  ClusterAssignment cats = categorize(out.smells);
  for (std::size_t i = 0; i < out.smells.size(); ++i) out.smells[i].category = cats.labels[i];
  return out;
}

Catalog load_catalog_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read catalog file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return load_catalog(buf.str());
}

}  // namespace tfsmell
