#pragma once

// ML-KEM byte-level codec: 12-bit coefficient packing, encapsulation-key
// canonicality and the decapsulation-key hash relation.

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

#include "pqassure/bytes.hpp"
#include "pqassure/digest.hpp"

namespace pqassure::mlkem {

inline constexpr std::uint16_t kQ = 3329;
inline constexpr std::size_t kCoefficients = 256;
inline constexpr std::size_t kBlockBytes = 384;

using Coefficients = std::array<std::uint16_t, kCoefficients>;

enum class Errc { wrong_block_length, coefficient_out_of_range, wrong_ek_length, wrong_dk_length, invalid_rank };

inline const char* to_string(Errc e) {
  switch (e) {
    case Errc::wrong_block_length: return "wrong-block-length";
    case Errc::coefficient_out_of_range: return "coefficient-out-of-range";
    case Errc::wrong_ek_length: return "wrong-ek-length";
    case Errc::wrong_dk_length: return "wrong-dk-length";
    case Errc::invalid_rank: return "invalid-rank";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Decapsulation key layout: dk_pke || ek || H(ek) || z.
struct Layout {
  unsigned k = 0;

  static Layout for_rank(unsigned rank) {
    if (rank < 2 || rank > 4) throw Error(Errc::invalid_rank, std::to_string(rank));
    return Layout{rank};
  }

  std::size_t vector_bytes() const { return kBlockBytes * k; }
  std::size_t ek_len() const { return kBlockBytes * k + 32; }
  std::size_t dk_len() const { return 768 * k + 96; }

  ByteRange dk_pke() const { return {0, vector_bytes()}; }
  ByteRange ek() const { return {vector_bytes(), ek_len()}; }
  ByteRange h_ek() const { return {768 * k + 32, 32}; }
  ByteRange z() const { return {768 * k + 64, 32}; }
};

inline Coefficients byte_decode12(ByteView block) {
  if (block.size() != kBlockBytes) {
    throw Error(Errc::wrong_block_length, std::to_string(block.size()) + " bytes");
  }
  Coefficients c{};
  for (std::size_t i = 0; i < kCoefficients / 2; ++i) {
    const std::uint16_t b0 = block[3 * i];
    const std::uint16_t b1 = block[3 * i + 1];
    const std::uint16_t b2 = block[3 * i + 2];
    c[2 * i] = static_cast<std::uint16_t>(b0 | ((b1 & 0x0F) << 8));
    c[2 * i + 1] = static_cast<std::uint16_t>((b1 >> 4) | (b2 << 4));
  }
  return c;
}

inline Bytes byte_encode12(std::span<const std::uint16_t> coeffs) {
  if (coeffs.size() != kCoefficients) {
    throw Error(Errc::coefficient_out_of_range, "expected 256 coefficients, got " + std::to_string(coeffs.size()));
  }
  Bytes out(kBlockBytes);
  for (std::size_t i = 0; i < kCoefficients; ++i) {
    if (coeffs[i] >= 4096) {
      throw Error(Errc::coefficient_out_of_range, "index " + std::to_string(i) + " = " + std::to_string(coeffs[i]));
    }
  }
  for (std::size_t i = 0; i < kCoefficients / 2; ++i) {
    const std::uint16_t a = coeffs[2 * i];
    const std::uint16_t b = coeffs[2 * i + 1];
    out[3 * i] = static_cast<std::uint8_t>(a & 0xFF);
    out[3 * i + 1] = static_cast<std::uint8_t>((a >> 8) | ((b & 0x0F) << 4));
    out[3 * i + 2] = static_cast<std::uint8_t>(b >> 4);
  }
  return out;
}

struct Canonicality {
  bool canonical = true;
  std::size_t first_offending_index = 0;  // coefficient index across the whole t-hat vector
  std::size_t offending_count = 0;
};

// Every 12-bit lane of the t-hat encoding must be < q; rho is exempt. This is
// equivalent to ByteEncode12(ByteDecode12(ek) mod q) == ek for the packed part.
inline Canonicality check_ek_canonical(ByteView ek, const Layout& layout) {
  if (ek.size() != layout.ek_len()) {
    throw Error(Errc::wrong_ek_length,
                std::to_string(ek.size()) + " bytes, expected " + std::to_string(layout.ek_len()));
  }
  Canonicality result;
  for (unsigned blk = 0; blk < layout.k; ++blk) {
    const auto coeffs = byte_decode12(ek.subspan(blk * kBlockBytes, kBlockBytes));
    for (std::size_t i = 0; i < kCoefficients; ++i) {
      if (coeffs[i] < kQ) continue;
      if (result.canonical) result.first_offending_index = blk * kCoefficients + i;
      result.canonical = false;
      ++result.offending_count;
    }
  }
  return result;
}

enum class HashRelation { consistent, mismatch };

inline HashRelation check_expanded_hash(ByteView dk, const Layout& layout) {
  if (dk.size() != layout.dk_len()) {
    throw Error(Errc::wrong_dk_length,
                std::to_string(dk.size()) + " bytes, expected " + std::to_string(layout.dk_len()));
  }
  const auto ek = layout.ek();
  const auto h = layout.h_ek();
  const Bytes digest = sha3_256(dk.subspan(ek.offset, ek.length));
  return std::equal(digest.begin(), digest.end(), dk.begin() + static_cast<std::ptrdiff_t>(h.offset))
             ? HashRelation::consistent
             : HashRelation::mismatch;
}

}  // namespace pqassure::mlkem
