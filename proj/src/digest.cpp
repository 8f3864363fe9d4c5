#include "tfsmell/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <memory>
#include <stdexcept>

namespace tfsmell {

namespace {

std::string hex_digest(const EVP_MD* md, std::initializer_list<std::string_view> chunks) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), md, nullptr) != 1) throw std::runtime_error("digest init failed");
  for (auto chunk : chunks) EVP_DigestUpdate(ctx.get(), chunk.data(), chunk.size());
  std::array<unsigned char, EVP_MAX_MD_SIZE> raw{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), raw.data(), &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[raw[i] >> 4];
    out += kHex[raw[i] & 0xF];
  }
  return out;
}

}  // namespace

std::string sha256_hex(std::string_view data) { return hex_digest(EVP_sha256(), {data}); }

std::string git_blob_sha(std::string_view content) {
  std::string header = "blob " + std::to_string(content.size());
  header.push_back('\0');
  return hex_digest(EVP_sha1(), {header, content});
}

}  // namespace tfsmell
