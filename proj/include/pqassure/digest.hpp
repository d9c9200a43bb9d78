#pragma once

// Thin wrappers over OpenSSL's EVP digests and base64 codec.

#include <openssl/evp.h>

#include <array>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "pqassure/bytes.hpp"

namespace pqassure {

namespace detail {

struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};

inline Bytes evp_digest(const EVP_MD* md, ByteView data, std::size_t xof_len = 0) {
  std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx(EVP_MD_CTX_new());
  if (!ctx || EVP_DigestInit_ex(ctx.get(), md, nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1) {
    throw std::runtime_error("EVP digest initialisation failed");
  }
  Bytes out;
  if (xof_len > 0) {
    out.resize(xof_len);
    if (EVP_DigestFinalXOF(ctx.get(), out.data(), out.size()) != 1) {
      throw std::runtime_error("EVP XOF squeeze failed");
    }
  } else {
    out.resize(static_cast<std::size_t>(EVP_MD_get_size(md)));
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx.get(), out.data(), &len) != 1) {
      throw std::runtime_error("EVP digest finalisation failed");
    }
    out.resize(len);
  }
  return out;
}

}  // namespace detail

inline Bytes sha256(ByteView data) { return detail::evp_digest(EVP_sha256(), data); }

inline Bytes sha3_256(ByteView data) { return detail::evp_digest(EVP_sha3_256(), data); }

inline Bytes shake256(ByteView data, std::size_t out_len) {
  if (out_len == 0) return {};
  return detail::evp_digest(EVP_shake256(), data, out_len);
}

inline std::string base64_encode(ByteView data) {
  if (data.empty()) return {};
  std::string out(4 * ((data.size() + 2) / 3), '\0');
  int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), data.data(),
                          static_cast<int>(data.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

// Strict base64 decode; input must already be stripped of whitespace.
inline Bytes base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw std::invalid_argument("base64 length not a multiple of 4");
  if (text.empty()) return {};
  Bytes out(3 * text.size() / 4);
  int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                          static_cast<int>(text.size()));
  if (n < 0) throw std::invalid_argument("invalid base64");
  std::size_t pad = 0;
  if (text.back() == '=') ++pad;
  if (text.size() >= 2 && text[text.size() - 2] == '=') ++pad;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

}  // namespace pqassure
