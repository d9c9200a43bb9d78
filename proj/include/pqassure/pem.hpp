#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "pqassure/bytes.hpp"
#include "pqassure/digest.hpp"

namespace pqassure::pem {

inline constexpr std::string_view kCertificate = "CERTIFICATE";
inline constexpr std::string_view kPublicKey = "PUBLIC KEY";
inline constexpr std::string_view kPrivateKey = "PRIVATE KEY";

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Block {
  std::string label;
  Bytes der;
};

inline std::string encode(std::string_view label, ByteView der) {
  const std::string b64 = base64_encode(der);
  std::string out = "-----BEGIN " + std::string(label) + "-----\n";
  for (std::size_t i = 0; i < b64.size(); i += 64) {
    out += b64.substr(i, 64);
    out.push_back('\n');
  }
  out += "-----END " + std::string(label) + "-----\n";
  return out;
}

// Decodes the first PEM block in `text`.
inline Block decode(std::string_view text) {
  constexpr std::string_view kBegin = "-----BEGIN ";
  constexpr std::string_view kDashes = "-----";
  const auto begin = text.find(kBegin);
  if (begin == std::string_view::npos) throw Error("no PEM BEGIN line");
  const auto label_start = begin + kBegin.size();
  const auto label_end = text.find(kDashes, label_start);
  if (label_end == std::string_view::npos) throw Error("unterminated PEM BEGIN line");
  Block block;
  block.label = std::string(text.substr(label_start, label_end - label_start));

  const std::string end_line = "-----END " + block.label + "-----";
  const auto body_start = label_end + kDashes.size();
  const auto end = text.find(end_line, body_start);
  if (end == std::string_view::npos) throw Error("missing PEM END line for " + block.label);

  std::string b64;
  for (char c : text.substr(body_start, end - body_start)) {
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') continue;
    b64.push_back(c);
  }
  try {
    block.der = base64_decode(b64);
  } catch (const std::invalid_argument& e) {
    throw Error(std::string("PEM body: ") + e.what());
  }
  return block;
}

// Accepts raw DER (first byte 0x30) or a PEM block carrying `expected_label`.
inline Bytes to_der(ByteView input, std::string_view expected_label) {
  if (!input.empty() && input[0] == 0x30) return Bytes(input.begin(), input.end());
  const std::string_view text(reinterpret_cast<const char*>(input.data()), input.size());
  Block block = decode(text);
  if (block.label != expected_label) {
    throw Error("PEM label '" + block.label + "' where '" + std::string(expected_label) + "' expected");
  }
  return std::move(block.der);
}

}  // namespace pqassure::pem
