#pragma once

// Minimal strict DER reader/writer.
//
// Only definite-length, minimally encoded, low-tag-number DER is accepted.
// Parsed elements carry offsets into the source buffer so that callers can
// cite exact byte spans and mutation operators can address them.

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pqassure/bytes.hpp"

namespace pqassure::der {

enum class Errc {
  truncated_content,
  indefinite_length,
  non_minimal_length,
  length_overflow,
  reserved_tag,
  invalid_constructed_form,
  trailing_data,
  depth_exceeded,
  wrong_tag,
  invalid_arcs,
  malformed_oid,
  empty_content,
  unused_bits_out_of_range,
  nonzero_padding_bits,
};

inline const char* to_string(Errc e) {
  switch (e) {
    case Errc::truncated_content: return "truncated-content";
    case Errc::indefinite_length: return "indefinite-length";
    case Errc::non_minimal_length: return "non-minimal-length";
    case Errc::length_overflow: return "length-overflow";
    case Errc::reserved_tag: return "reserved-tag";
    case Errc::invalid_constructed_form: return "invalid-constructed-form";
    case Errc::trailing_data: return "trailing-data";
    case Errc::depth_exceeded: return "depth-exceeded";
    case Errc::wrong_tag: return "wrong-tag";
    case Errc::invalid_arcs: return "invalid-arcs";
    case Errc::malformed_oid: return "malformed-oid";
    case Errc::empty_content: return "empty-content";
    case Errc::unused_bits_out_of_range: return "unused-bits-out-of-range";
    case Errc::nonzero_padding_bits: return "nonzero-padding-bits";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::size_t offset, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + " at offset " + std::to_string(offset) +
                           (what.empty() ? "" : ": " + what)),
        code_(code),
        offset_(offset) {}

  Errc code() const noexcept { return code_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  Errc code_;
  std::size_t offset_;
};

inline constexpr std::size_t kMaxDepth = 32;

namespace tag {
inline constexpr std::uint8_t kBoolean = 0x01;
inline constexpr std::uint8_t kInteger = 0x02;
inline constexpr std::uint8_t kBitString = 0x03;
inline constexpr std::uint8_t kOctetString = 0x04;
inline constexpr std::uint8_t kNull = 0x05;
inline constexpr std::uint8_t kOid = 0x06;
inline constexpr std::uint8_t kUtf8String = 0x0C;
inline constexpr std::uint8_t kUtcTime = 0x17;
inline constexpr std::uint8_t kGeneralizedTime = 0x18;
inline constexpr std::uint8_t kSequence = 0x30;
inline constexpr std::uint8_t kSet = 0x31;

inline constexpr std::uint8_t context(std::uint8_t number, bool constructed) {
  return static_cast<std::uint8_t>(0x80 | (constructed ? 0x20 : 0x00) | number);
}
}  // namespace tag

enum class TagClass : std::uint8_t { universal = 0, application = 1, context = 2, private_use = 3 };

struct Tag {
  std::uint8_t byte = 0;

  TagClass tag_class() const { return static_cast<TagClass>(byte >> 6); }
  bool constructed() const { return (byte & 0x20) != 0; }
  std::uint8_t number() const { return byte & 0x1F; }

  bool operator==(const Tag&) const = default;
};

// One parsed TLV. `content` views the source buffer and does not own it.
struct DerElement {
  Tag tag;
  std::size_t length = 0;
  ByteView content;
  ByteRange header_span;
  ByteRange content_span;

  ByteRange span() const { return {header_span.offset, header_span.length + content_span.length}; }
};

inline DerElement parse_element(ByteView buffer, std::size_t offset) {
  if (offset >= buffer.size()) throw Error(Errc::truncated_content, offset, "no tag byte");
  const std::uint8_t tag_byte = buffer[offset];
  if ((tag_byte & 0x1F) == 0x1F) throw Error(Errc::reserved_tag, offset, "high-tag-number form");
  Tag t{tag_byte};
  if (t.tag_class() == TagClass::universal) {
    const auto n = t.number();
    if (n == 0) throw Error(Errc::reserved_tag, offset, "universal tag 0");
    // Strings and scalars are primitive in DER; SEQUENCE/SET are constructed.
    const bool must_be_primitive = n <= 0x06 || n == 0x0C || n == 0x13 || n == 0x16 || n == 0x17 ||
                                   n == 0x18;
    const bool must_be_constructed = n == 0x10 || n == 0x11;
    if ((must_be_primitive && t.constructed()) || (must_be_constructed && !t.constructed())) {
      throw Error(Errc::invalid_constructed_form, offset, "");
    }
  }

  std::size_t pos = offset + 1;
  if (pos >= buffer.size()) throw Error(Errc::truncated_content, pos, "no length byte");
  const std::uint8_t first = buffer[pos++];
  std::size_t length = 0;
  if (first < 0x80) {
    length = first;
  } else if (first == 0x80) {
    throw Error(Errc::indefinite_length, offset, "");
  } else {
    const std::size_t n = first & 0x7F;
    if (n > 4) throw Error(Errc::length_overflow, offset, std::to_string(n) + " length octets");
    if (pos + n > buffer.size()) throw Error(Errc::truncated_content, pos, "length octets");
    if (buffer[pos] == 0x00) throw Error(Errc::non_minimal_length, offset, "leading zero length octet");
    for (std::size_t i = 0; i < n; ++i) length = (length << 8) | buffer[pos + i];
    pos += n;
    if (length < 0x80) throw Error(Errc::non_minimal_length, offset, "long form for short length");
  }
  if (length > buffer.size() - pos) {
    throw Error(Errc::truncated_content, offset,
                "declared " + std::to_string(length) + ", available " + std::to_string(buffer.size() - pos));
  }

  DerElement e;
  e.tag = t;
  e.length = length;
  e.content = buffer.subspan(pos, length);
  e.header_span = {offset, pos - offset};
  e.content_span = {pos, length};
  return e;
}

// Direct children of a constructed element; they must tile the content exactly.
inline std::vector<DerElement> children(ByteView buffer, const DerElement& parent) {
  std::vector<DerElement> out;
  std::size_t pos = parent.content_span.offset;
  const std::size_t end = pos + parent.content_span.length;
  const ByteView bounded = buffer.first(end);
  while (pos < end) {
    DerElement child = parse_element(bounded, pos);
    pos = child.content_span.offset + child.content_span.length;
    out.push_back(child);
  }
  return out;
}

// Parses a complete DER document: one outermost element, no trailing bytes,
// every constructed descendant well formed, nesting no deeper than max_depth.
inline DerElement parse_document(ByteView buffer, std::size_t max_depth = kMaxDepth) {
  DerElement root = parse_element(buffer, 0);
  const std::size_t end = root.span().length;
  if (end != buffer.size()) {
    throw Error(Errc::trailing_data, end, std::to_string(buffer.size() - end) + " trailing bytes");
  }
  std::vector<std::pair<DerElement, std::size_t>> stack{{root, 1}};
  while (!stack.empty()) {
    auto [element, depth] = stack.back();
    stack.pop_back();
    if (!element.tag.constructed()) continue;
    if (depth > max_depth) throw Error(Errc::depth_exceeded, element.header_span.offset, "");
    for (const auto& child : children(buffer, element)) stack.emplace_back(child, depth + 1);
  }
  return root;
}

inline void expect_tag(const DerElement& e, std::uint8_t tag_byte) {
  if (e.tag.byte != tag_byte) {
    std::ostringstream os;
    os << "expected tag 0x" << std::hex << int(tag_byte) << ", found 0x" << int(e.tag.byte);
    throw Error(Errc::wrong_tag, e.header_span.offset, os.str());
  }
}

// ---------------------------------------------------------------------------
// Writer

inline Bytes encode_length(std::size_t length) {
  if (length < 0x80) return {static_cast<std::uint8_t>(length)};
  Bytes digits;
  for (std::size_t v = length; v != 0; v >>= 8) digits.insert(digits.begin(), static_cast<std::uint8_t>(v & 0xFF));
  Bytes out{static_cast<std::uint8_t>(0x80 | digits.size())};
  out.insert(out.end(), digits.begin(), digits.end());
  return out;
}

inline Bytes encode_tlv(std::uint8_t tag_byte, ByteView content) {
  Bytes out{tag_byte};
  const Bytes len = encode_length(content.size());
  out.insert(out.end(), len.begin(), len.end());
  out.insert(out.end(), content.begin(), content.end());
  return out;
}

inline Bytes encode_integer(std::uint64_t value) {
  Bytes content;
  do {
    content.insert(content.begin(), static_cast<std::uint8_t>(value & 0xFF));
    value >>= 8;
  } while (value != 0);
  if (content.front() & 0x80) content.insert(content.begin(), 0x00);
  return encode_tlv(tag::kInteger, content);
}

inline Bytes encode_boolean(bool value) { return encode_tlv(tag::kBoolean, Bytes{value ? std::uint8_t{0xFF} : std::uint8_t{0x00}}); }

inline Bytes encode_null() { return {tag::kNull, 0x00}; }

inline Bytes encode_sequence(std::initializer_list<Bytes> parts, std::uint8_t tag_byte = tag::kSequence) {
  Bytes content;
  for (const auto& p : parts) content.insert(content.end(), p.begin(), p.end());
  return encode_tlv(tag_byte, content);
}

// ---------------------------------------------------------------------------
// OBJECT IDENTIFIER

struct ObjectIdentifier {
  std::vector<std::uint64_t> arcs;

  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < arcs.size(); ++i) {
      if (i) out.push_back('.');
      out += std::to_string(arcs[i]);
    }
    return out;
  }

  bool operator==(const ObjectIdentifier&) const = default;
};

inline bool valid_arcs(const std::vector<std::uint64_t>& arcs) {
  if (arcs.size() < 2 || arcs[0] > 2) return false;
  if (arcs[0] < 2 && arcs[1] >= 40) return false;
  if (arcs[0] == 2 && arcs[1] > UINT64_MAX - 80) return false;
  return true;
}

inline Bytes encode_oid_content(const std::vector<std::uint64_t>& arcs) {
  if (!valid_arcs(arcs)) throw Error(Errc::invalid_arcs, 0, "");
  auto put_base128 = [](Bytes& out, std::uint64_t v) {
    std::uint8_t buf[10];
    std::size_t n = 0;
    do {
      buf[n++] = static_cast<std::uint8_t>(v & 0x7F);
      v >>= 7;
    } while (v != 0);
    while (n > 1) out.push_back(static_cast<std::uint8_t>(buf[--n] | 0x80));
    out.push_back(buf[0]);
  };
  Bytes out;
  put_base128(out, arcs[0] * 40 + arcs[1]);
  for (std::size_t i = 2; i < arcs.size(); ++i) put_base128(out, arcs[i]);
  return out;
}

inline Bytes encode_oid(const std::vector<std::uint64_t>& arcs) {
  return encode_tlv(tag::kOid, encode_oid_content(arcs));
}

inline std::vector<std::uint64_t> decode_oid(ByteView content) {
  if (content.empty()) throw Error(Errc::malformed_oid, 0, "empty OID");
  if (content.back() & 0x80) throw Error(Errc::malformed_oid, content.size() - 1, "unterminated subidentifier");
  std::vector<std::uint64_t> subids;
  std::uint64_t acc = 0;
  bool fresh = true;
  for (std::size_t i = 0; i < content.size(); ++i) {
    const std::uint8_t b = content[i];
    if (fresh && b == 0x80) throw Error(Errc::malformed_oid, i, "non-minimal subidentifier");
    if (acc > (UINT64_MAX >> 7)) throw Error(Errc::malformed_oid, i, "subidentifier overflow");
    acc = (acc << 7) | (b & 0x7F);
    fresh = false;
    if (!(b & 0x80)) {
      subids.push_back(acc);
      acc = 0;
      fresh = true;
    }
  }
  std::vector<std::uint64_t> arcs;
  const std::uint64_t first = subids.front();
  if (first < 40) {
    arcs = {0, first};
  } else if (first < 80) {
    arcs = {1, first - 40};
  } else {
    arcs = {2, first - 80};
  }
  arcs.insert(arcs.end(), subids.begin() + 1, subids.end());
  return arcs;
}

inline ObjectIdentifier parse_oid(const DerElement& e) {
  expect_tag(e, tag::kOid);
  return {decode_oid(e.content)};
}

// ---------------------------------------------------------------------------
// BIT STRING

struct BitString {
  std::uint8_t unused_bits = 0;
  std::vector<bool> bits;  // MSB-first; bit i is named bit i

  bool test(std::size_t i) const { return i < bits.size() && bits[i]; }
};

inline BitString decode_bit_string_content(ByteView content, std::size_t at = 0) {
  if (content.empty()) throw Error(Errc::empty_content, at, "BIT STRING without unused-bits octet");
  const std::uint8_t unused = content[0];
  if (unused > 7) throw Error(Errc::unused_bits_out_of_range, at, std::to_string(unused));
  if (content.size() == 1 && unused != 0) {
    throw Error(Errc::unused_bits_out_of_range, at, "unused bits declared on empty bit string");
  }
  if (content.size() > 1) {
    const std::uint8_t mask = static_cast<std::uint8_t>((1u << unused) - 1);
    if (content.back() & mask) throw Error(Errc::nonzero_padding_bits, at + content.size() - 1, "");
  }
  BitString out;
  out.unused_bits = unused;
  const std::size_t total = (content.size() - 1) * 8 - unused;
  out.bits.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    out.bits.push_back(((content[1 + i / 8] >> (7 - i % 8)) & 1) != 0);
  }
  return out;
}

inline BitString parse_bit_string(const DerElement& e) {
  expect_tag(e, tag::kBitString);
  return decode_bit_string_content(e.content, e.content_span.offset);
}

// DER named-bit encoding: trailing zero bits are dropped.
inline Bytes encode_named_bits(std::uint32_t mask) {
  if (mask == 0) return {tag::kBitString, 0x01, 0x00};
  int highest = 31;
  while (!(mask & (1u << highest))) --highest;
  const std::size_t nbytes = static_cast<std::size_t>(highest) / 8 + 1;
  Bytes content(nbytes + 1, 0);
  content[0] = static_cast<std::uint8_t>(7 - highest % 8);
  for (int i = 0; i <= highest; ++i) {
    if (mask & (1u << i)) content[1 + i / 8] |= static_cast<std::uint8_t>(0x80 >> (i % 8));
  }
  return encode_tlv(tag::kBitString, content);
}

inline Bytes encode_bit_string(ByteView payload) {
  Bytes content{0x00};
  content.insert(content.end(), payload.begin(), payload.end());
  return encode_tlv(tag::kBitString, content);
}

// ---------------------------------------------------------------------------
// Mutable tree, used where enclosing lengths must be recomputed after edits.

struct DerNode {
  std::uint8_t tag = 0;
  Bytes content;                // primitive content
  std::vector<DerNode> nodes;   // constructed children

  bool constructed() const { return (tag & 0x20) != 0; }

  static DerNode primitive(std::uint8_t tag_byte, Bytes content_bytes) {
    return DerNode{tag_byte, std::move(content_bytes), {}};
  }

  static DerNode parse(ByteView buffer) {
    const DerElement root = parse_document(buffer);
    return from_element(buffer, root);
  }

  Bytes encode() const {
    if (!constructed()) return encode_tlv(tag, content);
    Bytes body;
    for (const auto& n : nodes) {
      const Bytes enc = n.encode();
      body.insert(body.end(), enc.begin(), enc.end());
    }
    return encode_tlv(tag, body);
  }

 private:
  static DerNode from_element(ByteView buffer, const DerElement& e) {
    DerNode node;
    node.tag = e.tag.byte;
    if (!e.tag.constructed()) {
      node.content.assign(e.content.begin(), e.content.end());
      return node;
    }
    for (const auto& c : children(buffer, e)) node.nodes.push_back(from_element(buffer, c));
    return node;
  }
};

}  // namespace pqassure::der
