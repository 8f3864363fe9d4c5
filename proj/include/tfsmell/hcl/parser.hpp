#pragma once

#include "tfsmell/hcl/ast.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace tfsmell::hcl {

/// Parses one Terraform file. Never throws on malformed input: a top-level
/// item that fails to parse is dropped, a diagnostic is recorded and parsing
/// resumes at the next line that starts with an identifier in column 1.
ConfigFile parse(std::string_view text, std::string path = {}, std::uint32_t file_id = 0);

/// Decodes the body of a quoted HCL string (without the quotes) into either
/// a String or a Template expression.
Expression parse_string_content(std::string_view body);

}  // namespace tfsmell::hcl
