#pragma once

#include <string>
#include <string_view>

namespace tfsmell {

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// The object id git assigns to a blob with this content
/// (SHA-1 over "blob <size>\0" followed by the bytes).
std::string git_blob_sha(std::string_view content);

}  // namespace tfsmell
