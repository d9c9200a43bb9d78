#pragma once

// Typed views over the three artifact surfaces: X.509 certificates,
// SubjectPublicKeyInfo objects and PKCS#8 / OneAsymmetricKey containers.
// Parsers extract exactly the fields the detectors read and keep a byte
// range for each so findings can cite a locus.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pqassure/bytes.hpp"
#include "pqassure/der.hpp"
#include "pqassure/pem.hpp"

namespace pqassure::pkix {

// ---------------------------------------------------------------------------
// Algorithm catalog

enum class Family { ml_kem, ml_dsa, hash_ml_dsa };

inline std::string_view to_string(Family f) {
  switch (f) {
    case Family::ml_kem: return "ML-KEM";
    case Family::ml_dsa: return "ML-DSA";
    case Family::hash_ml_dsa: return "HashML-DSA";
  }
  return "?";
}

enum class ParameterSet { ml_kem_512, ml_kem_768, ml_kem_1024, ml_dsa_44, ml_dsa_65, ml_dsa_87 };

inline constexpr std::array<ParameterSet, 6> kAllParameterSets = {
    ParameterSet::ml_kem_512, ParameterSet::ml_kem_768, ParameterSet::ml_kem_1024,
    ParameterSet::ml_dsa_44,  ParameterSet::ml_dsa_65,  ParameterSet::ml_dsa_87};

inline std::string_view to_string(ParameterSet p) {
  switch (p) {
    case ParameterSet::ml_kem_512: return "ML-KEM-512";
    case ParameterSet::ml_kem_768: return "ML-KEM-768";
    case ParameterSet::ml_kem_1024: return "ML-KEM-1024";
    case ParameterSet::ml_dsa_44: return "ML-DSA-44";
    case ParameterSet::ml_dsa_65: return "ML-DSA-65";
    case ParameterSet::ml_dsa_87: return "ML-DSA-87";
  }
  return "?";
}

inline std::optional<ParameterSet> parse_parameter_set(std::string_view token) {
  for (auto p : kAllParameterSets) {
    if (to_string(p) == token) return p;
  }
  return std::nullopt;
}

inline Family family_of(ParameterSet p) {
  switch (p) {
    case ParameterSet::ml_kem_512:
    case ParameterSet::ml_kem_768:
    case ParameterSet::ml_kem_1024: return Family::ml_kem;
    default: return Family::ml_dsa;
  }
}

// ML-KEM module rank k; zero for ML-DSA.
inline unsigned mlkem_rank(ParameterSet p) {
  switch (p) {
    case ParameterSet::ml_kem_512: return 2;
    case ParameterSet::ml_kem_768: return 3;
    case ParameterSet::ml_kem_1024: return 4;
    default: return 0;
  }
}

struct AlgorithmCatalogEntry {
  std::string_view name;
  std::vector<std::uint64_t> oid;
  Family family;
  std::optional<ParameterSet> parameter_set;  // none for HashML-DSA
  ParameterSet key_parameter_set;             // underlying key geometry
  std::size_t expected_public_key_len;
  std::size_t expected_seed_len;
  std::size_t expected_expanded_len;
  std::size_t signature_len;                  // ML-DSA only
};

namespace detail {
inline std::vector<std::uint64_t> nist_alg(std::uint64_t group, std::uint64_t leaf) {
  return {2, 16, 840, 1, 101, 3, 4, group, leaf};
}
}  // namespace detail

// ML-KEM: ek = 384k+32, dk = 768k+96, seed d||z = 64.
// ML-DSA: pk/sk from the FIPS 204 parameter table, seed xi = 32.
inline const std::vector<AlgorithmCatalogEntry>& catalog() {
  using detail::nist_alg;
  using P = ParameterSet;
  static const std::vector<AlgorithmCatalogEntry> entries = {
      {"ML-KEM-512", nist_alg(4, 1), Family::ml_kem, P::ml_kem_512, P::ml_kem_512, 800, 64, 1632, 0},
      {"ML-KEM-768", nist_alg(4, 2), Family::ml_kem, P::ml_kem_768, P::ml_kem_768, 1184, 64, 2400, 0},
      {"ML-KEM-1024", nist_alg(4, 3), Family::ml_kem, P::ml_kem_1024, P::ml_kem_1024, 1568, 64, 3168, 0},
      {"ML-DSA-44", nist_alg(3, 17), Family::ml_dsa, P::ml_dsa_44, P::ml_dsa_44, 1312, 32, 2560, 2420},
      {"ML-DSA-65", nist_alg(3, 18), Family::ml_dsa, P::ml_dsa_65, P::ml_dsa_65, 1952, 32, 4032, 3309},
      {"ML-DSA-87", nist_alg(3, 19), Family::ml_dsa, P::ml_dsa_87, P::ml_dsa_87, 2592, 32, 4896, 4627},
      {"HashML-DSA-44", nist_alg(3, 32), Family::hash_ml_dsa, std::nullopt, P::ml_dsa_44, 1312, 32, 2560, 2420},
      {"HashML-DSA-65", nist_alg(3, 33), Family::hash_ml_dsa, std::nullopt, P::ml_dsa_65, 1952, 32, 4032, 3309},
      {"HashML-DSA-87", nist_alg(3, 34), Family::hash_ml_dsa, std::nullopt, P::ml_dsa_87, 2592, 32, 4896, 4627},
  };
  return entries;
}

inline const AlgorithmCatalogEntry* find_by_oid(const std::vector<std::uint64_t>& arcs) {
  for (const auto& e : catalog()) {
    if (e.oid == arcs) return &e;
  }
  return nullptr;
}

inline const AlgorithmCatalogEntry& entry_for(ParameterSet p) {
  for (const auto& e : catalog()) {
    if (e.parameter_set == p) return e;
  }
  throw std::logic_error("parameter set missing from catalog");
}

inline const AlgorithmCatalogEntry& hashml_counterpart(ParameterSet p) {
  for (const auto& e : catalog()) {
    if (e.family == Family::hash_ml_dsa && e.key_parameter_set == p) return e;
  }
  throw std::invalid_argument("no HashML-DSA counterpart for " + std::string(to_string(p)));
}

// ---------------------------------------------------------------------------
// Errors

enum class Errc {
  malformed_der,
  not_a_certificate_shape,
  not_an_spki_shape,
  not_a_private_key_shape,
  keyusage_undecodable,
  bitstring_padding_nonzero,
  unknown_choice_tag,
  both_form_not_two_octet_strings,
};

inline const char* to_string(Errc e) {
  switch (e) {
    case Errc::malformed_der: return "malformed-der";
    case Errc::not_a_certificate_shape: return "not-a-certificate-shape";
    case Errc::not_an_spki_shape: return "not-an-spki-shape";
    case Errc::not_a_private_key_shape: return "not-a-private-key-shape";
    case Errc::keyusage_undecodable: return "keyusage-undecodable";
    case Errc::bitstring_padding_nonzero: return "bitstring-padding-nonzero";
    case Errc::unknown_choice_tag: return "unknown-choice-tag";
    case Errc::both_form_not_two_octet_strings: return "both-form-not-two-octet-strings";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + (what.empty() ? "" : ": " + what)), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// ---------------------------------------------------------------------------
// Views

enum class ParamsKind { absent, null_present, other_present };

inline std::string_view to_string(ParamsKind k) {
  switch (k) {
    case ParamsKind::absent: return "absent";
    case ParamsKind::null_present: return "NULL";
    case ParamsKind::other_present: return "present";
  }
  return "?";
}

struct AlgorithmIdentifierView {
  der::ObjectIdentifier oid;
  ParamsKind parameters = ParamsKind::absent;
  Bytes parameter_bytes;  // full TLV of the parameters field, if any
  std::string locus;
  ByteRange span;
  const AlgorithmCatalogEntry* catalog = nullptr;  // any catalog hit, including HashML-DSA
};

enum class KeyUsageBit : std::uint8_t {
  digital_signature = 0,
  non_repudiation = 1,
  key_encipherment = 2,
  data_encipherment = 3,
  key_agreement = 4,
  key_cert_sign = 5,
  crl_sign = 6,
  encipher_only = 7,
  decipher_only = 8,
};

inline constexpr std::array<std::string_view, 9> kKeyUsageNames = {
    "digitalSignature", "nonRepudiation", "keyEncipherment", "dataEncipherment", "keyAgreement",
    "keyCertSign",      "cRLSign",        "encipherOnly",    "decipherOnly"};

struct KeyUsageBits {
  std::uint32_t mask = 0;

  static constexpr KeyUsageBits of(std::initializer_list<KeyUsageBit> bits) {
    KeyUsageBits k;
    for (auto b : bits) k.mask |= 1u << static_cast<unsigned>(b);
    return k;
  }

  bool has(KeyUsageBit b) const { return (mask >> static_cast<unsigned>(b)) & 1u; }
  bool empty() const { return mask == 0; }

  std::string describe() const {
    if (mask == 0) return "{}";
    std::string out = "{";
    bool first = true;
    for (unsigned i = 0; i < 32; ++i) {
      if (!((mask >> i) & 1u)) continue;
      if (!first) out += ",";
      out += i < kKeyUsageNames.size() ? std::string(kKeyUsageNames[i]) : "bit" + std::to_string(i);
      first = false;
    }
    return out + "}";
  }

  bool operator==(const KeyUsageBits&) const = default;
};

struct SpkiView {
  AlgorithmIdentifierView algorithm;
  Bytes public_key;
  ByteRange span;
  ByteRange public_key_span;
  std::string locus_prefix;  // "spki" or "tbs.subjectPublicKeyInfo"
  // Resolved only for ML-KEM and ML-DSA; HashML-DSA and unknown OIDs stay unresolved.
  const AlgorithmCatalogEntry* catalog = nullptr;

  std::optional<Family> family() const {
    return catalog ? std::optional<Family>(catalog->family) : std::nullopt;
  }
};

struct ExtensionView {
  der::ObjectIdentifier oid;
  bool critical = false;
  Bytes value;
  ByteRange span;
};

struct CertificateView {
  AlgorithmIdentifierView tbs_signature_aid;
  AlgorithmIdentifierView outer_signature_aid;
  SpkiView spki;
  std::optional<KeyUsageBits> key_usage;  // nullopt: extension absent
  ByteRange key_usage_span;
  std::vector<ExtensionView> extensions;
  Bytes raw;
};

enum class PrivateKeyForm { seed, expanded, both };

inline std::string_view to_string(PrivateKeyForm f) {
  switch (f) {
    case PrivateKeyForm::seed: return "seed";
    case PrivateKeyForm::expanded: return "expanded";
    case PrivateKeyForm::both: return "both";
  }
  return "?";
}

struct PrivateKeyContainerView {
  AlgorithmIdentifierView algorithm;
  PrivateKeyForm form = PrivateKeyForm::seed;
  Bytes seed;      // empty unless form is seed or both
  Bytes expanded;  // empty unless form is expanded or both
  std::int64_t version = 0;
  ByteRange private_key_span;
  Bytes raw;

  const AlgorithmCatalogEntry* catalog() const {
    const auto* e = algorithm.catalog;
    return (e && e->family != Family::hash_ml_dsa) ? e : nullptr;
  }
};

struct ParseOptions {
  // Also accept an EXPLICIT [0] wrapper around the seed OCTET STRING.
  bool accept_explicit_seed_tag = false;
};

inline std::vector<std::uint64_t> kKeyUsageOid() { return {2, 5, 29, 15}; }

// ---------------------------------------------------------------------------
// Parsers

namespace detail {

inline der::DerElement parse_der_document(ByteView der_bytes) {
  try {
    return der::parse_document(der_bytes);
  } catch (const der::Error& e) {
    throw Error(Errc::malformed_der, e.what());
  }
}

inline Bytes load(ByteView input, std::string_view label) {
  try {
    return pem::to_der(input, label);
  } catch (const pem::Error& e) {
    throw Error(Errc::malformed_der, e.what());
  }
}

inline AlgorithmIdentifierView parse_aid(ByteView buf, const der::DerElement& e, std::string locus,
                                         Errc shape) {
  if (e.tag.byte != der::tag::kSequence) throw Error(shape, locus + ": AlgorithmIdentifier is not a SEQUENCE");
  const auto kids = der::children(buf, e);
  if (kids.empty() || kids.size() > 2 || kids[0].tag.byte != der::tag::kOid) {
    throw Error(shape, locus + ": AlgorithmIdentifier shape");
  }
  AlgorithmIdentifierView aid;
  try {
    aid.oid = der::parse_oid(kids[0]);
  } catch (const der::Error& err) {
    throw Error(Errc::malformed_der, locus + ": " + err.what());
  }
  aid.locus = std::move(locus);
  aid.span = e.span();
  if (kids.size() == 2) {
    const auto& p = kids[1];
    const bool is_null = p.tag.byte == der::tag::kNull && p.length == 0;
    aid.parameters = is_null ? ParamsKind::null_present : ParamsKind::other_present;
    const auto s = p.span();
    aid.parameter_bytes.assign(buf.begin() + s.offset, buf.begin() + s.offset + s.length);
  }
  aid.catalog = find_by_oid(aid.oid.arcs);
  return aid;
}

inline SpkiView parse_spki_element(ByteView buf, const der::DerElement& e, std::string prefix) {
  if (e.tag.byte != der::tag::kSequence) throw Error(Errc::not_an_spki_shape, prefix + " is not a SEQUENCE");
  const auto kids = der::children(buf, e);
  if (kids.size() != 2 || kids[1].tag.byte != der::tag::kBitString) {
    throw Error(Errc::not_an_spki_shape, prefix + ": expected AlgorithmIdentifier and BIT STRING");
  }
  SpkiView spki;
  spki.locus_prefix = prefix;
  spki.algorithm = parse_aid(buf, kids[0], prefix + ".algorithm", Errc::not_an_spki_shape);
  spki.span = e.span();
  const auto& bits = kids[1];
  if (bits.content.empty()) throw Error(Errc::malformed_der, prefix + ".subjectPublicKey: empty BIT STRING");
  if (bits.content[0] != 0) {
    throw Error(Errc::bitstring_padding_nonzero,
                prefix + ".subjectPublicKey: unused-bits octet " + std::to_string(bits.content[0]));
  }
  spki.public_key.assign(bits.content.begin() + 1, bits.content.end());
  spki.public_key_span = {bits.content_span.offset + 1, bits.content_span.length - 1};
  const auto* entry = spki.algorithm.catalog;
  if (entry && entry->family != Family::hash_ml_dsa) spki.catalog = entry;
  return spki;
}

inline KeyUsageBits decode_key_usage(ByteView extn_value) {
  try {
    const auto bs_el = der::parse_document(extn_value);
    const auto bits = der::parse_bit_string(bs_el);
    KeyUsageBits ku;
    for (std::size_t i = 0; i < bits.bits.size(); ++i) {
      if (!bits.bits[i]) continue;
      if (i >= 32) throw Error(Errc::keyusage_undecodable, "named bit beyond 31");
      ku.mask |= 1u << i;
    }
    // DER named bit lists carry no trailing zero bits.
    if (!bits.bits.empty() && !bits.bits.back()) {
      throw Error(Errc::keyusage_undecodable, "trailing zero bits in named bit list");
    }
    return ku;
  } catch (const der::Error& e) {
    throw Error(Errc::keyusage_undecodable, e.what());
  }
}

}  // namespace detail

inline SpkiView parse_spki(ByteView input) {
  const Bytes der_bytes = detail::load(input, pem::kPublicKey);
  const auto root = detail::parse_der_document(der_bytes);
  return detail::parse_spki_element(der_bytes, root, "spki");
}

inline CertificateView parse_certificate(ByteView input) {
  using der::DerElement;
  namespace tag = der::tag;
  CertificateView cert;
  cert.raw = detail::load(input, pem::kCertificate);
  const ByteView buf = cert.raw;
  const auto root = detail::parse_der_document(buf);
  constexpr auto shape = Errc::not_a_certificate_shape;

  if (root.tag.byte != tag::kSequence) throw Error(shape, "outer element is not a SEQUENCE");
  const auto outer = der::children(buf, root);
  if (outer.size() != 3 || outer[0].tag.byte != tag::kSequence || outer[2].tag.byte != tag::kBitString) {
    throw Error(shape, "expected tbsCertificate, signatureAlgorithm, signatureValue");
  }
  cert.outer_signature_aid = detail::parse_aid(buf, outer[1], "signatureAlgorithm", shape);

  const auto tbs = der::children(buf, outer[0]);
  std::size_t i = 0;
  if (i < tbs.size() && tbs[i].tag.byte == tag::context(0, true)) ++i;  // version
  if (tbs.size() < i + 6) throw Error(shape, "tbsCertificate has too few fields");
  if (tbs[i].tag.byte != tag::kInteger) throw Error(shape, "serialNumber is not an INTEGER");
  cert.tbs_signature_aid = detail::parse_aid(buf, tbs[i + 1], "tbs.signature", shape);
  for (std::size_t k = 2; k <= 4; ++k) {
    if (tbs[i + k].tag.byte != tag::kSequence) throw Error(shape, "issuer/validity/subject shape");
  }
  cert.spki = detail::parse_spki_element(buf, tbs[i + 5], "tbs.subjectPublicKeyInfo");
  i += 6;
  if (i < tbs.size() && tbs[i].tag.byte == tag::context(1, false)) ++i;
  if (i < tbs.size() && tbs[i].tag.byte == tag::context(2, false)) ++i;

  if (i < tbs.size() && tbs[i].tag.byte == tag::context(3, true)) {
    const auto wrapper = der::children(buf, tbs[i]);
    if (wrapper.size() != 1 || wrapper[0].tag.byte != tag::kSequence) throw Error(shape, "extensions wrapper");
    for (const auto& ext : der::children(buf, wrapper[0])) {
      if (ext.tag.byte != tag::kSequence) throw Error(shape, "Extension is not a SEQUENCE");
      const auto parts = der::children(buf, ext);
      if (parts.size() < 2 || parts.size() > 3 || parts[0].tag.byte != tag::kOid ||
          parts.back().tag.byte != tag::kOctetString ||
          (parts.size() == 3 && parts[1].tag.byte != tag::kBoolean)) {
        throw Error(shape, "Extension fields");
      }
      ExtensionView view;
      try {
        view.oid = der::parse_oid(parts[0]);
      } catch (const der::Error& e) {
        throw Error(Errc::malformed_der, e.what());
      }
      view.critical = parts.size() == 3 && !parts[1].content.empty() && parts[1].content[0] != 0;
      view.value.assign(parts.back().content.begin(), parts.back().content.end());
      view.span = ext.span();
      for (const auto& seen : cert.extensions) {
        if (seen.oid == view.oid) throw Error(shape, "duplicate extension " + view.oid.to_string());
      }
      if (view.oid.arcs == kKeyUsageOid()) {
        cert.key_usage = detail::decode_key_usage(view.value);
        cert.key_usage_span = parts.back().content_span;
      }
      cert.extensions.push_back(std::move(view));
    }
    ++i;
  }
  if (i != tbs.size()) throw Error(shape, "unexpected trailing tbsCertificate fields");
  return cert;
}

inline PrivateKeyContainerView parse_private_key_container(ByteView input, const ParseOptions& options = {}) {
  namespace tag = der::tag;
  constexpr auto shape = Errc::not_a_private_key_shape;
  PrivateKeyContainerView key;
  key.raw = detail::load(input, pem::kPrivateKey);
  const ByteView buf = key.raw;
  const auto root = detail::parse_der_document(buf);
  if (root.tag.byte != tag::kSequence) throw Error(shape, "outer element is not a SEQUENCE");
  const auto kids = der::children(buf, root);
  if (kids.size() < 3 || kids[0].tag.byte != tag::kInteger || kids[2].tag.byte != tag::kOctetString) {
    throw Error(shape, "expected version, privateKeyAlgorithm, privateKey");
  }
  if (kids[0].length != 1 || kids[0].content[0] > 1) throw Error(shape, "unsupported OneAsymmetricKey version");
  key.version = kids[0].content[0];
  key.algorithm = detail::parse_aid(buf, kids[1], "privateKeyAlgorithm", shape);
  key.private_key_span = kids[2].content_span;

  const ByteView inner = kids[2].content;
  const auto choice = detail::parse_der_document(inner);
  const std::uint8_t t = choice.tag.byte;
  if (t == tag::context(0, false)) {
    key.form = PrivateKeyForm::seed;
    key.seed.assign(choice.content.begin(), choice.content.end());
  } else if (t == tag::context(0, true) && options.accept_explicit_seed_tag) {
    const auto wrapped = der::children(inner, choice);
    if (wrapped.size() != 1 || wrapped[0].tag.byte != tag::kOctetString) {
      throw Error(Errc::unknown_choice_tag, "explicit seed wrapper does not hold an OCTET STRING");
    }
    key.form = PrivateKeyForm::seed;
    key.seed.assign(wrapped[0].content.begin(), wrapped[0].content.end());
  } else if (t == tag::kOctetString) {
    key.form = PrivateKeyForm::expanded;
    key.expanded.assign(choice.content.begin(), choice.content.end());
  } else if (t == tag::kSequence) {
    const auto parts = der::children(inner, choice);
    if (parts.size() != 2 || parts[0].tag.byte != tag::kOctetString || parts[1].tag.byte != tag::kOctetString) {
      throw Error(Errc::both_form_not_two_octet_strings, "");
    }
    key.form = PrivateKeyForm::both;
    key.seed.assign(parts[0].content.begin(), parts[0].content.end());
    key.expanded.assign(parts[1].content.begin(), parts[1].content.end());
  } else {
    throw Error(Errc::unknown_choice_tag, "privateKey CHOICE tag 0x" + to_hex(Bytes{t}));
  }
  return key;
}

}  // namespace pqassure::pkix
