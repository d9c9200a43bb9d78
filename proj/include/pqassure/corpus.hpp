#pragma once

// Deterministic corpus: 21 synthesized valid artifacts (a certificate, an
// SPKI and a private key for each of seven identities), the 27-entry mutation
// roster derived from them, and the hash-ledgered JSON-lines manifest.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "pqassure/bytes.hpp"
#include "pqassure/der.hpp"
#include "pqassure/digest.hpp"
#include "pqassure/mlkem_codec.hpp"
#include "pqassure/pem.hpp"
#include "pqassure/pkix.hpp"
#include "pqassure/registry.hpp"
#include "pqassure/substrate.hpp"

namespace pqassure::corpus {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Manifest

struct ManifestEntry {
  std::string artifact_id;
  std::string path;  // relative to the manifest's directory
  ArtifactType artifact_type = ArtifactType::certificate;
  Stage stage = Stage::certificate_profile;
  Algorithm algorithm = Algorithm::ml_kem;
  std::string parameter_set;
  bool valid = true;
  std::string source_note;
  std::string sha256;
  std::optional<FaultFamily> fault_family;
  std::vector<std::string> mutation_tokens;
  std::vector<std::string> expected_detection;
};

inline nlohmann::json to_json(const ManifestEntry& e) {
  nlohmann::json j = {
      {"artifact_id", e.artifact_id},
      {"path", e.path},
      {"artifact_type", name_of(e.artifact_type)},
      {"stage", name_of(e.stage)},
      {"algorithm", name_of(e.algorithm)},
      {"parameter_set", e.parameter_set},
      {"validity", e.valid ? "valid" : "invalid"},
      {"source_note", e.source_note},
      {"sha256", e.sha256},
  };
  if (!e.valid) {
    j["fault_family"] = e.fault_family ? std::string(name_of(*e.fault_family)) : std::string();
    j["mutation_tokens"] = e.mutation_tokens;
    j["expected_detection"] = e.expected_detection;
  }
  return j;
}

class ManifestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string manifest_string(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) throw ManifestError(std::string("manifest entry missing ") + key);
  return j[key].get<std::string>();
}

template <typename E>
E manifest_enum(const nlohmann::json& j, const char* key) {
  auto v = parse_enum<E>(manifest_string(j, key));
  if (!v) throw ManifestError(std::string("manifest entry has unknown ") + key);
  return *v;
}

}  // namespace detail

inline ManifestEntry entry_from_json(const nlohmann::json& j) {
  auto str = [&](const char* k) { return detail::manifest_string(j, k); };
  ManifestEntry e;
  e.artifact_id = str("artifact_id");
  e.path = str("path");
  e.artifact_type = detail::manifest_enum<ArtifactType>(j, "artifact_type");
  e.stage = detail::manifest_enum<Stage>(j, "stage");
  e.algorithm = detail::manifest_enum<Algorithm>(j, "algorithm");
  e.parameter_set = str("parameter_set");
  const auto validity = str("validity");
  if (validity != "valid" && validity != "invalid") throw ManifestError("validity must be valid or invalid");
  e.valid = validity == "valid";
  e.source_note = str("source_note");
  e.sha256 = str("sha256");
  if (!e.valid) {
    e.fault_family = detail::manifest_enum<FaultFamily>(j, "fault_family");
    e.mutation_tokens = j.value("mutation_tokens", std::vector<std::string>{});
    e.expected_detection = j.value("expected_detection", std::vector<std::string>{});
  }
  return e;
}

inline void write_manifest(std::vector<ManifestEntry> entries, const fs::path& path) {
  std::sort(entries.begin(), entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.artifact_id < b.artifact_id; });
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ManifestError("io-failure: cannot write " + path.string());
  for (const auto& e : entries) out << to_json(e).dump() << '\n';
}

inline std::vector<ManifestEntry> read_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ManifestError("io-failure: cannot read " + path.string());
  std::vector<ManifestEntry> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      entries.push_back(entry_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ManifestError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return entries;
}

inline Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ManifestError("io-failure: cannot read " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ManifestError("io-failure: cannot write " + path.string());
  out << text;
}

struct VerificationIssue {
  std::string kind;  // hash-mismatch | missing-file | label-violation
  std::string artifact_id;
  std::string detail;
};

struct VerificationReport {
  std::size_t entries = 0;
  std::vector<VerificationIssue> issues;

  bool clean() const { return issues.empty(); }
  std::size_t count(std::string_view kind) const {
    return static_cast<std::size_t>(
        std::count_if(issues.begin(), issues.end(), [&](const VerificationIssue& i) { return i.kind == kind; }));
  }
};

inline VerificationReport verify_manifest(const fs::path& manifest_path) {
  VerificationReport rep;
  const auto entries = read_manifest(manifest_path);
  const fs::path base = manifest_path.parent_path();
  rep.entries = entries.size();
  for (const auto& e : entries) {
    if (e.valid != e.expected_detection.empty()) {
      rep.issues.push_back({"label-violation", e.artifact_id,
                            e.valid ? "valid entry carries expected detections" : "invalid entry has no expected detection"});
    }
    const fs::path p = base / e.path;
    if (!fs::is_regular_file(p)) {
      rep.issues.push_back({"missing-file", e.artifact_id, p.string()});
      continue;
    }
    const auto digest = to_hex(sha256(read_file(p)));
    if (digest != e.sha256) rep.issues.push_back({"hash-mismatch", e.artifact_id, digest});
  }
  return rep;
}

inline nlohmann::json to_json(const VerificationReport& rep) {
  nlohmann::json issues = nlohmann::json::array();
  for (const auto& i : rep.issues) issues.push_back({{"kind", i.kind}, {"artifact_id", i.artifact_id}, {"detail", i.detail}});
  return {{"entries", rep.entries}, {"clean", rep.clean()}, {"issues", issues}};
}

// ---------------------------------------------------------------------------
// Valid artifact synthesis

struct Identity {
  std::string name;  // e.g. "mldsa65-ca"
  pkix::ParameterSet ps;
  bool ca = false;
  pkix::PrivateKeyForm form = pkix::PrivateKeyForm::seed;
};

inline const std::vector<Identity>& identities() {
  using P = pkix::ParameterSet;
  using F = pkix::PrivateKeyForm;
  static const std::vector<Identity> ids = {
      {"mldsa44-ee", P::ml_dsa_44, false, F::both},       {"mldsa65-ca", P::ml_dsa_65, true, F::seed},
      {"mldsa65-ee", P::ml_dsa_65, false, F::expanded},   {"mldsa87-ee", P::ml_dsa_87, false, F::both},
      {"mlkem512-ee", P::ml_kem_512, false, F::both},     {"mlkem768-ee", P::ml_kem_768, false, F::seed},
      {"mlkem1024-ee", P::ml_kem_1024, false, F::expanded},
  };
  return ids;
}

inline const Identity& issuing_ca() { return identities()[1]; }

inline std::string file_stem(std::string id) {
  std::replace(id.begin(), id.end(), '-', '_');
  return id;
}

struct KeyMaterial {
  Bytes seed;
  Bytes expanded;
  Bytes public_key;
};

inline KeyMaterial derive_material(const Identity& id) {
  const auto& entry = pkix::entry_for(id.ps);
  KeyMaterial m;
  m.seed = shake256(to_bytes("pq-assure corpus seed:" + id.name), entry.expected_seed_len);
  m.expanded = substrate::expand_seed(id.ps, m.seed);
  if (entry.family == pkix::Family::ml_kem) {
    const auto ek = mlkem::Layout::for_rank(pkix::mlkem_rank(id.ps)).ek();
    m.public_key.assign(m.expanded.begin() + static_cast<std::ptrdiff_t>(ek.offset),
                        m.expanded.begin() + static_cast<std::ptrdiff_t>(ek.offset + ek.length));
  } else {
    m.public_key = shake256(concat(m.seed, to_bytes("mldsa-public")), entry.expected_public_key_len);
  }
  return m;
}

namespace detail {

inline Bytes aid(pkix::ParameterSet ps) { return der::encode_sequence({der::encode_oid(pkix::entry_for(ps).oid)}); }

inline Bytes name(const std::string& cn) {
  const Bytes atv = der::encode_sequence({der::encode_oid({2, 5, 4, 3}), der::encode_tlv(der::tag::kUtf8String, to_bytes(cn))});
  return der::encode_sequence({der::encode_sequence({atv}, der::tag::kSet)});
}

inline Bytes extension(std::vector<std::uint64_t> oid, bool critical, const Bytes& value) {
  Bytes body = der::encode_oid(oid);
  if (critical) {
    const Bytes b = der::encode_boolean(true);
    body.insert(body.end(), b.begin(), b.end());
  }
  const Bytes v = der::encode_tlv(der::tag::kOctetString, value);
  body.insert(body.end(), v.begin(), v.end());
  return der::encode_tlv(der::tag::kSequence, body);
}

inline std::string common_name(const Identity& id) { return "pq-assure " + id.name; }

}  // namespace detail

inline Bytes build_spki(pkix::ParameterSet ps, ByteView public_key) {
  return der::encode_sequence({detail::aid(ps), der::encode_bit_string(public_key)});
}

inline pkix::KeyUsageBits profile_key_usage(const Identity& id) {
  using B = pkix::KeyUsageBit;
  if (pkix::family_of(id.ps) == pkix::Family::ml_kem) return pkix::KeyUsageBits::of({B::key_encipherment});
  if (id.ca) return pkix::KeyUsageBits::of({B::digital_signature, B::key_cert_sign, B::crl_sign});
  return pkix::KeyUsageBits::of({B::digital_signature});
}

// ML-DSA identities are self-issued under their own parameter set; ML-KEM
// subjects cannot sign, so the ML-DSA-65 CA issues them.
inline Bytes build_certificate(const Identity& id, const KeyMaterial& m) {
  const bool kem = pkix::family_of(id.ps) == pkix::Family::ml_kem;
  const Identity& issuer = kem ? issuing_ca() : id;
  const auto sig_ps = issuer.ps;

  const Bytes serial_src = sha256(to_bytes("serial:" + id.name));
  std::uint64_t serial = 0;
  for (int i = 0; i < 8; ++i) serial = (serial << 8) | serial_src[static_cast<std::size_t>(i)];
  serial = (serial & 0x3FFFFFFFFFFFFFFFull) | 0x0100000000000000ull;

  Bytes ext_list;
  auto push_ext = [&](const Bytes& ext) { ext_list.insert(ext_list.end(), ext.begin(), ext.end()); };
  if (id.ca) push_ext(detail::extension({2, 5, 29, 19}, true, der::encode_sequence({der::encode_boolean(true)})));
  push_ext(detail::extension({2, 5, 29, 15}, true, der::encode_named_bits(profile_key_usage(id).mask)));
  const Bytes ski = sha256(m.public_key);
  push_ext(detail::extension({2, 5, 29, 14}, false,
                             der::encode_tlv(der::tag::kOctetString, ByteView(ski).first(20))));

  const Bytes tbs = der::encode_sequence({
      der::encode_tlv(der::tag::context(0, true), der::encode_integer(2)),
      der::encode_integer(serial),
      detail::aid(sig_ps),
      detail::name(detail::common_name(issuer)),
      der::encode_sequence({der::encode_tlv(der::tag::kUtcTime, to_bytes("260101000000Z")),
                            der::encode_tlv(der::tag::kUtcTime, to_bytes("360101000000Z"))}),
      detail::name(detail::common_name(id)),
      build_spki(id.ps, m.public_key),
      der::encode_tlv(der::tag::context(3, true), der::encode_tlv(der::tag::kSequence, ext_list)),
  });
  const Bytes signature = shake256(concat(tbs, to_bytes("signature:" + issuer.name)), pkix::entry_for(sig_ps).signature_len);
  return der::encode_sequence({tbs, detail::aid(sig_ps), der::encode_bit_string(signature)});
}

inline Bytes build_private_key(pkix::ParameterSet ps, pkix::PrivateKeyForm form, const KeyMaterial& m) {
  Bytes choice;
  switch (form) {
    case pkix::PrivateKeyForm::seed: choice = der::encode_tlv(der::tag::context(0, false), m.seed); break;
    case pkix::PrivateKeyForm::expanded: choice = der::encode_tlv(der::tag::kOctetString, m.expanded); break;
    case pkix::PrivateKeyForm::both:
      choice = der::encode_sequence({der::encode_tlv(der::tag::kOctetString, m.seed),
                                     der::encode_tlv(der::tag::kOctetString, m.expanded)});
      break;
  }
  return der::encode_sequence({der::encode_integer(0), detail::aid(ps), der::encode_tlv(der::tag::kOctetString, choice)});
}

inline std::string_view pem_label(ArtifactType t) {
  switch (t) {
    case ArtifactType::certificate: return pem::kCertificate;
    case ArtifactType::spki: return pem::kPublicKey;
    case ArtifactType::private_key_container: return pem::kPrivateKey;
  }
  return pem::kCertificate;
}

inline Stage natural_stage(ArtifactType t) {
  switch (t) {
    case ArtifactType::certificate: return Stage::certificate_profile;
    case ArtifactType::spki: return Stage::spki_public_key;
    case ArtifactType::private_key_container: return Stage::private_key_import;
  }
  return Stage::certificate_profile;
}

// The algorithm and parameter set an artifact claims through its OIDs: the
// subject key for certificates and SPKIs, the key algorithm for containers.
inline std::pair<Algorithm, std::string> claimed_algorithm(ArtifactType t, ByteView der_bytes) {
  const pkix::AlgorithmCatalogEntry* entry = nullptr;
  switch (t) {
    case ArtifactType::certificate: entry = pkix::parse_certificate(der_bytes).spki.catalog; break;
    case ArtifactType::spki: entry = pkix::parse_spki(der_bytes).catalog; break;
    case ArtifactType::private_key_container: entry = pkix::parse_private_key_container(der_bytes).catalog(); break;
  }
  if (!entry) throw ManifestError("artifact algorithm does not resolve to ML-KEM or ML-DSA");
  return {entry->family == pkix::Family::ml_kem ? Algorithm::ml_kem : Algorithm::ml_dsa, std::string(entry->name)};
}

struct ForgedArtifact {
  ManifestEntry entry;
  Bytes der;
};

inline std::vector<ForgedArtifact> forge_valid() {
  std::vector<ForgedArtifact> out;
  for (const auto& id : identities()) {
    const auto m = derive_material(id);
    const std::string signer = pkix::family_of(id.ps) == pkix::Family::ml_kem
                                   ? "issued by " + issuing_ca().name
                                   : "self-issued";
    const std::vector<std::tuple<ArtifactType, std::string, Bytes, std::string>> made = {
        {ArtifactType::spki, "pub", build_spki(id.ps, m.public_key), "SubjectPublicKeyInfo"},
        {ArtifactType::certificate, "cert", build_certificate(id, m),
         "certificate " + signer + ", keyUsage " + profile_key_usage(id).describe()},
        {ArtifactType::private_key_container, "key", build_private_key(id.ps, id.form, m),
         std::string(pkix::to_string(id.form)) + "-form private key"},
    };
    for (const auto& [type, suffix, der_bytes, note] : made) {
      ForgedArtifact a;
      a.entry.artifact_id = "openssl-" + id.name + "-" + suffix;
      a.entry.path = "valid/openssl/" + file_stem(a.entry.artifact_id) + ".pem";
      a.entry.artifact_type = type;
      a.entry.stage = natural_stage(type);
      a.entry.algorithm = pkix::family_of(id.ps) == pkix::Family::ml_kem ? Algorithm::ml_kem : Algorithm::ml_dsa;
      a.entry.parameter_set = std::string(pkix::to_string(id.ps));
      a.entry.valid = true;
      a.entry.source_note = "synthesized " + std::string(pkix::to_string(id.ps)) + " " + note;
      a.der = der_bytes;
      out.push_back(std::move(a));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mutation operators

class MutationError : public std::runtime_error {
 public:
  MutationError(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct MutationStep {
  std::string op;
  std::size_t amount = 1;                     // bytes removed or appended
  std::size_t offset = 0;                     // byte offset or coefficient index
  std::optional<pkix::ParameterSet> target;   // replacement OID
  std::uint32_t bits = 0;                     // keyUsage bits to add
};

struct MutationSpec {
  std::string artifact_id;
  std::string parent_id;
  Stage stage = Stage::certificate_profile;
  FaultFamily family = FaultFamily::encoding_container;
  std::vector<MutationStep> steps;
  std::vector<std::string> tokens;
  std::vector<std::string> expected_detection;

  std::string origin() const { return artifact_id.rfind("openssl-", 0) == 0 ? "openssl" : "der"; }
  std::string path() const { return "mutated/" + origin() + "/" + file_stem(artifact_id) + ".pem"; }
};

namespace detail {

using der::DerNode;

inline DerNode& child(DerNode& n, std::size_t i, const std::string& what) {
  if (!n.constructed() || i >= n.nodes.size()) throw MutationError("target-field-not-found", what);
  return n.nodes[i];
}

inline DerNode& tbs_of(DerNode& cert) {
  DerNode& tbs = child(cert, 0, "tbsCertificate");
  if (tbs.tag != der::tag::kSequence) throw MutationError("target-field-not-found", "tbsCertificate");
  return tbs;
}

inline std::size_t tbs_base(const DerNode& tbs) {
  return (!tbs.nodes.empty() && tbs.nodes[0].tag == der::tag::context(0, true)) ? 1 : 0;
}

inline DerNode& spki_of(DerNode& root, ArtifactType t) {
  if (t == ArtifactType::spki) return root;
  if (t != ArtifactType::certificate) throw MutationError("operator-inapplicable", "artifact has no SPKI");
  DerNode& tbs = tbs_of(root);
  return child(tbs, tbs_base(tbs) + 5, "tbs.subjectPublicKeyInfo");
}

inline std::vector<DerNode*> signature_aids(DerNode& root, ArtifactType t) {
  if (t != ArtifactType::certificate) throw MutationError("operator-inapplicable", "not a certificate");
  DerNode& tbs = tbs_of(root);
  return {&child(tbs, tbs_base(tbs) + 1, "tbs.signature"), &child(root, 1, "signatureAlgorithm")};
}

inline const pkix::AlgorithmCatalogEntry* aid_entry(DerNode& aid) {
  const DerNode& oid = child(aid, 0, "algorithm OID");
  if (oid.tag != der::tag::kOid) throw MutationError("target-field-not-found", "algorithm OID");
  return pkix::find_by_oid(der::decode_oid(oid.content));
}

inline DerNode& key_usage_value(DerNode& root, ArtifactType t) {
  if (t != ArtifactType::certificate) throw MutationError("operator-inapplicable", "not a certificate");
  DerNode& tbs = tbs_of(root);
  const Bytes ku_oid = der::encode_oid_content(pkix::kKeyUsageOid());
  for (auto& field : tbs.nodes) {
    if (field.tag != der::tag::context(3, true)) continue;
    for (auto& ext : child(field, 0, "extensions").nodes) {
      if (!ext.nodes.empty() && ext.nodes[0].content == ku_oid) return ext.nodes.back();
    }
  }
  throw MutationError("target-field-not-found", "keyUsage extension");
}

inline std::uint32_t read_mask(const DerNode& value) {
  const auto el = der::parse_document(value.content);
  const auto bits = der::parse_bit_string(el);
  std::uint32_t mask = 0;
  for (std::size_t i = 0; i < bits.bits.size() && i < 32; ++i) {
    if (bits.bits[i]) mask |= 1u << i;
  }
  return mask;
}

struct KeyParts {
  DerNode inner;
  Bytes* seed = nullptr;
  Bytes* expanded = nullptr;
};

inline DerNode& private_key_octets(DerNode& root, ArtifactType t) {
  if (t != ArtifactType::private_key_container) throw MutationError("operator-inapplicable", "not a private key");
  DerNode& pk = child(root, 2, "privateKey");
  if (pk.tag != der::tag::kOctetString) throw MutationError("target-field-not-found", "privateKey");
  return pk;
}

inline void bind(KeyParts& parts) {
  DerNode& in = parts.inner;
  if (in.tag == der::tag::context(0, false)) {
    parts.seed = &in.content;
  } else if (in.tag == der::tag::kOctetString) {
    parts.expanded = &in.content;
  } else if (in.tag == der::tag::kSequence && in.nodes.size() == 2) {
    parts.seed = &in.nodes[0].content;
    parts.expanded = &in.nodes[1].content;
  }
}

inline void shorten(Bytes* field, std::size_t amount, const char* what) {
  if (!field) throw MutationError("operator-inapplicable", std::string("container has no ") + what);
  if (field->size() <= amount) throw MutationError("operator-inapplicable", std::string(what) + " too short");
  field->resize(field->size() - amount);
}

}  // namespace detail

// Applies one operator to DER bytes; enclosing lengths are recomputed on re-encode.
inline Bytes apply_step(const MutationStep& step, ByteView input, ArtifactType type, std::string_view seed) {
  using detail::DerNode;
  const std::string& op = step.op;
  DerNode root = [&] {
    try {
      return DerNode::parse(input);
    } catch (const der::Error& e) {
      throw MutationError("operator-inapplicable", std::string("input is not DER: ") + e.what());
    }
  }();

  if (op == "aid-parameters-null" || op == "aid-parameters-present-non-null") {
    DerNode& aid = detail::child(detail::spki_of(root, type), 0, "spki.algorithm");
    if (aid.nodes.size() != 1) throw MutationError("operator-inapplicable", "parameters already present");
    aid.nodes.push_back(op == "aid-parameters-null" ? DerNode::primitive(der::tag::kNull, {})
                                                    : DerNode::primitive(der::tag::kOctetString, {0x00}));
  } else if (op == "signature-aid-parameters-null" || op == "signature-aid-parameters-present-non-null") {
    for (DerNode* aid : detail::signature_aids(root, type)) {
      if (aid->nodes.size() != 1) throw MutationError("operator-inapplicable", "signature parameters already present");
      aid->nodes.push_back(op == "signature-aid-parameters-null" ? DerNode::primitive(der::tag::kNull, {})
                                                                 : DerNode::primitive(der::tag::kOctetString, {0x00}));
    }
  } else if (op == "spki-public-key-truncate" || op == "spki-public-key-extend") {
    DerNode& bits = detail::child(detail::spki_of(root, type), 1, "subjectPublicKey");
    if (op == "spki-public-key-truncate") {
      if (bits.content.size() <= step.amount + 1) throw MutationError("operator-inapplicable", "key too short");
      bits.content.resize(bits.content.size() - step.amount);
    } else {
      const Bytes filler = shake256(to_bytes(std::string(seed) + ":extend"), step.amount);
      bits.content.insert(bits.content.end(), filler.begin(), filler.end());
    }
  } else if (op == "spki-oid-length-mismatch" || op == "aid-oid-family-swap") {
    if (!step.target) throw MutationError("operator-inapplicable", "no replacement OID");
    DerNode& aid = detail::child(detail::spki_of(root, type), 0, "spki.algorithm");
    const auto* current = detail::aid_entry(aid);
    const auto& target = pkix::entry_for(*step.target);
    if (!current || current->family == pkix::Family::hash_ml_dsa) {
      throw MutationError("operator-inapplicable", "SPKI algorithm is not ML-KEM or ML-DSA");
    }
    const bool same_family = current->family == target.family;
    if (op == "aid-oid-family-swap" && same_family) throw MutationError("operator-inapplicable", "same family");
    if (op == "spki-oid-length-mismatch" && (!same_family || current->expected_public_key_len == target.expected_public_key_len)) {
      throw MutationError("operator-inapplicable", "target does not change the expected length within the family");
    }
    aid.nodes[0].content = der::encode_oid_content(target.oid);
  } else if (op == "mlkem-unreduced-byteencode12-value") {
    DerNode& spki = detail::spki_of(root, type);
    const auto* entry = detail::aid_entry(detail::child(spki, 0, "spki.algorithm"));
    if (!entry || entry->family != pkix::Family::ml_kem) throw MutationError("operator-inapplicable", "not ML-KEM");
    Bytes& content = detail::child(spki, 1, "subjectPublicKey").content;
    const auto layout = mlkem::Layout::for_rank(pkix::mlkem_rank(entry->key_parameter_set));
    if (content.size() != layout.ek_len() + 1) throw MutationError("operator-inapplicable", "ek has wrong length");
    if (step.offset >= layout.k * mlkem::kCoefficients) throw MutationError("target-field-not-found", "coefficient index");
    const std::size_t block = step.offset / mlkem::kCoefficients;
    const std::size_t at = 1 + block * mlkem::kBlockBytes;
    auto coeffs = mlkem::byte_decode12(ByteView(content).subspan(at, mlkem::kBlockBytes));
    auto& c = coeffs[step.offset % mlkem::kCoefficients];
    if (c >= mlkem::kQ) throw MutationError("operator-inapplicable", "coefficient already unreduced");
    c = 4095;
    const Bytes enc = mlkem::byte_encode12(coeffs);
    std::copy(enc.begin(), enc.end(), content.begin() + static_cast<std::ptrdiff_t>(at));
  } else if (op == "hashml-dsa-signature-oid-in-pkix-cert") {
    for (DerNode* aid : detail::signature_aids(root, type)) {
      const auto* entry = detail::aid_entry(*aid);
      if (!entry || entry->family != pkix::Family::ml_dsa) throw MutationError("operator-inapplicable", "not ML-DSA signed");
      aid->nodes[0].content = der::encode_oid_content(pkix::hashml_counterpart(*entry->parameter_set).oid);
    }
  } else if (op.rfind("keyusage-", 0) == 0) {
    DerNode& value = detail::key_usage_value(root, type);
    std::uint32_t mask = detail::read_mask(value);
    const std::uint32_t ke = 1u << static_cast<unsigned>(pkix::KeyUsageBit::key_encipherment);
    const std::uint32_t signing = pkix::KeyUsageBits::of({pkix::KeyUsageBit::digital_signature,
                                                         pkix::KeyUsageBit::non_repudiation,
                                                         pkix::KeyUsageBit::key_cert_sign,
                                                         pkix::KeyUsageBit::crl_sign})
                                      .mask;
    if (op == "keyusage-empty") {
      mask = 0;
    } else if (op == "keyusage-key-encipherment") {
      mask |= ke;
    } else if (op == "keyusage-missing-key-encipherment") {
      if (!(mask & ke)) throw MutationError("operator-inapplicable", "keyEncipherment not set");
      mask &= ~ke;
    } else if (op == "keyusage-missing-signature-bit") {
      if (!(mask & signing)) throw MutationError("operator-inapplicable", "no signing bit set");
      mask &= ~signing;
    } else if (op == "keyusage-extra-prohibited-bit") {
      if (step.bits == 0) throw MutationError("operator-inapplicable", "no bit to add");
      mask |= step.bits;
    } else {
      throw MutationError("operator-inapplicable", "unknown operator " + op);
    }
    value.content = der::encode_named_bits(mask);
  } else if (op.rfind("private-key-", 0) == 0 || op == "mlkem-expanded-key-hash-mismatch") {
    DerNode& octets = detail::private_key_octets(root, type);
    detail::KeyParts parts{DerNode::parse(octets.content)};
    detail::bind(parts);
    if (op == "private-key-seed-length-short") {
      detail::shorten(parts.seed, step.amount, "seed");
    } else if (op == "private-key-expanded-length-short") {
      detail::shorten(parts.expanded, step.amount, "expanded key");
    } else if (op == "private-key-both-seed-expanded-mismatch") {
      if (!parts.seed || !parts.expanded) throw MutationError("operator-inapplicable", "not a both-form key");
      if (step.offset >= parts.expanded->size()) throw MutationError("target-field-not-found", "expanded offset");
      (*parts.expanded)[step.offset] ^= 0x01;
    } else if (op == "mlkem-expanded-key-hash-mismatch") {
      const auto* entry = detail::aid_entry(detail::child(root, 1, "privateKeyAlgorithm"));
      if (!entry || entry->family != pkix::Family::ml_kem || !parts.expanded) {
        throw MutationError("operator-inapplicable", "not an ML-KEM expanded key");
      }
      const auto layout = mlkem::Layout::for_rank(pkix::mlkem_rank(entry->key_parameter_set));
      if (parts.expanded->size() != layout.dk_len()) throw MutationError("operator-inapplicable", "dk has wrong length");
      (*parts.expanded)[layout.h_ek().offset + step.offset % 32] ^= 0x01;
    } else {
      throw MutationError("operator-inapplicable", "unknown operator " + op);
    }
    octets.content = parts.inner.encode();
  } else {
    throw MutationError("operator-inapplicable", "unknown operator " + op);
  }
  return root.encode();
}

inline Bytes apply_mutation(const MutationSpec& spec, ByteView input, ArtifactType type) {
  Bytes cur(input.begin(), input.end());
  for (const auto& step : spec.steps) cur = apply_step(step, cur, type, spec.artifact_id);
  return cur;
}

// The 27-entry invalid roster: parent, operator chain, labels.
inline const std::vector<MutationSpec>& invalid_roster() {
  using P = pkix::ParameterSet;
  using S = Stage;
  using F = FaultFamily;
  using Steps = std::vector<MutationStep>;
  using Ids = std::vector<std::string>;
  const auto op = [](std::string name) {
    MutationStep s;
    s.op = std::move(name);
    return s;
  };
  const auto retarget = [op](std::string name, P ps) {
    MutationStep s = op(std::move(name));
    s.target = ps;
    return s;
  };
  const auto sized = [op](std::string name, std::size_t amount) {
    MutationStep s = op(std::move(name));
    s.amount = amount;
    return s;
  };
  const auto at = [op](std::string name, std::size_t offset) {
    MutationStep s = op(std::move(name));
    s.offset = offset;
    return s;
  };
  MutationStep add_digital_signature = op("keyusage-extra-prohibited-bit");
  add_digital_signature.bits = 1u << static_cast<unsigned>(pkix::KeyUsageBit::digital_signature);

  static const std::vector<MutationSpec> roster = {
      // raw SPKI
      {"der-mut-mldsa44-spki-oid-swapped-to-mldsa65-pub", "openssl-mldsa44-ee-pub", S::spki_public_key,
       F::inter_field_consistency, Steps{retarget("spki-oid-length-mismatch", P::ml_dsa_65)},
       Ids{"spki-oid-length-mismatch"}, Ids{"MLDSA-SPKI-PUBLIC-KEY-LENGTH"}},
      {"der-mut-mldsa65-spki-aid-null-pub", "openssl-mldsa65-ee-pub", S::spki_public_key, F::encoding_container,
       Steps{op("aid-parameters-null")}, Ids{"aid-parameters-null"}, Ids{"MLDSA-SPKI-AID-PARAMS-ABSENT"}},
      {"der-mut-mldsa65-spki-aid-octet-params-pub", "openssl-mldsa65-ee-pub", S::spki_public_key,
       F::encoding_container, Steps{op("aid-parameters-present-non-null")}, Ids{"aid-parameters-present-non-null"},
       Ids{"MLDSA-SPKI-AID-PARAMS-ABSENT"}},
      {"der-mut-mldsa87-spki-payload-2602-pub", "openssl-mldsa87-ee-pub", S::spki_public_key, F::size_shape,
       Steps{sized("spki-public-key-extend", 10)},
       Ids{"spki-public-key-extend", "rfc9881-appendix-size-transcription-2602"}, Ids{"MLDSA-SPKI-PUBLIC-KEY-LENGTH"}},
      {"der-mut-mldsa65-spki-oid-swapped-to-mlkem768-pub", "openssl-mldsa65-ee-pub", S::spki_public_key,
       F::inter_field_consistency, Steps{retarget("aid-oid-family-swap", P::ml_kem_768)},
       Ids{"aid-oid-family-swap", "spki-oid-length-mismatch"}, Ids{"MLKEM-SPKI-PUBLIC-KEY-LENGTH"}},
      {"der-mut-mlkem512-spki-oid-swapped-to-mlkem768-pub", "openssl-mlkem512-ee-pub", S::spki_public_key,
       F::inter_field_consistency, Steps{retarget("spki-oid-length-mismatch", P::ml_kem_768)},
       Ids{"spki-oid-length-mismatch"}, Ids{"MLKEM-SPKI-PUBLIC-KEY-LENGTH"}},
      {"der-mut-mlkem768-spki-aid-null-pub", "openssl-mlkem768-ee-pub", S::spki_public_key, F::encoding_container,
       Steps{op("aid-parameters-null")}, Ids{"aid-parameters-null"}, Ids{"MLKEM-SPKI-AID-PARAMS-ABSENT"}},
      {"der-mut-mlkem768-spki-aid-octet-params-pub", "openssl-mlkem768-ee-pub", S::spki_public_key,
       F::encoding_container, Steps{op("aid-parameters-present-non-null")}, Ids{"aid-parameters-present-non-null"},
       Ids{"MLKEM-SPKI-AID-PARAMS-ABSENT"}},
      {"der-mut-mlkem768-spki-payload-truncated-pub", "openssl-mlkem768-ee-pub", S::spki_public_key, F::size_shape,
       Steps{sized("spki-public-key-truncate", 1)}, Ids{"spki-public-key-truncate"},
       Ids{"MLKEM-SPKI-PUBLIC-KEY-LENGTH"}},
      {"der-mut-mlkem768-spki-unreduced-byteencode12-pub", "openssl-mlkem768-ee-pub", S::spki_public_key,
       F::field_domain, Steps{at("mlkem-unreduced-byteencode12-value", 7)}, Ids{"mlkem-unreduced-byteencode12-value"},
       Ids{"MLKEM-SPKI-ENCODE-DECODE-IDENTITY"}},
      // certificate-carried SPKI
      {"der-mut-mlkem768-cert-spki-aid-null", "openssl-mlkem768-ee-cert", S::spki_public_key, F::encoding_container,
       Steps{op("aid-parameters-null")}, Ids{"aid-parameters-null"}, Ids{"MLKEM-SPKI-AID-PARAMS-ABSENT"}},
      {"der-mut-mlkem768-cert-spki-aid-octet-params", "openssl-mlkem768-ee-cert", S::spki_public_key,
       F::encoding_container, Steps{op("aid-parameters-present-non-null")}, Ids{"aid-parameters-present-non-null"},
       Ids{"MLKEM-SPKI-AID-PARAMS-ABSENT"}},
      {"der-mut-mlkem768-cert-spki-payload-truncated", "openssl-mlkem768-ee-cert", S::spki_public_key,
       F::size_shape, Steps{sized("spki-public-key-truncate", 1)}, Ids{"spki-public-key-truncate"},
       Ids{"MLKEM-SPKI-PUBLIC-KEY-LENGTH"}},
      // certificate/profile
      {"der-mut-mldsa44-cert-signature-aid-null", "openssl-mldsa44-ee-cert", S::certificate_profile,
       F::encoding_container, Steps{op("signature-aid-parameters-null")}, Ids{"signature-aid-parameters-null"},
       Ids{"MLDSA-CERT-SIGNATURE-AID-PARAMS-ABSENT"}},
      {"der-mut-mldsa44-cert-signature-aid-octet-params", "openssl-mldsa44-ee-cert", S::certificate_profile,
       F::encoding_container, Steps{op("signature-aid-parameters-present-non-null")},
       Ids{"signature-aid-parameters-present-non-null"}, Ids{"MLDSA-CERT-SIGNATURE-AID-PARAMS-ABSENT"}},
      {"der-mut-mldsa44-cert-signature-hashmldsa44", "openssl-mldsa44-ee-cert", S::certificate_profile,
       F::algorithm_policy, Steps{op("hashml-dsa-signature-oid-in-pkix-cert")},
       Ids{"hashml-dsa-signature-oid-in-pkix-cert", "hashml-dsa-pkix-context"}, Ids{"MLDSA-PKIX-HASHML-FORBIDDEN"}},
      {"der-mut-mldsa65-cert-keyusage-empty", "openssl-mldsa65-ee-cert", S::certificate_profile,
       F::profile_usage_policy, Steps{op("keyusage-empty")}, Ids{"keyusage-empty"},
       Ids{"MLDSA-CERT-KU-AT-LEAST-ONE-SIGNING-BIT"}},
      {"openssl-mut-mldsa65-keyusage-key-encipherment-cert", "openssl-mldsa65-ee-cert", S::certificate_profile,
       F::profile_usage_policy, Steps{op("keyusage-missing-signature-bit"), op("keyusage-key-encipherment")},
       Ids{"keyusage-missing-signature-bit", "keyusage-key-encipherment"},
       Ids{"MLDSA-CERT-KU-AT-LEAST-ONE-SIGNING-BIT", "MLDSA-CERT-KU-NO-ENCIPHERMENT-OR-AGREEMENT"}},
      {"der-mut-mlkem768-cert-keyusage-empty", "openssl-mlkem768-ee-cert", S::certificate_profile,
       F::profile_usage_policy, Steps{op("keyusage-empty")}, Ids{"keyusage-empty"},
       Ids{"MLKEM-CERT-KU-KEYENCIPHERMENT-ONLY"}},
      {"openssl-mut-mlkem768-keyusage-digital-signature-cert", "openssl-mlkem768-ee-cert", S::certificate_profile,
       F::profile_usage_policy, Steps{op("keyusage-missing-key-encipherment"), add_digital_signature},
       Ids{"keyusage-missing-key-encipherment", "keyusage-extra-prohibited-bit"},
       Ids{"MLKEM-CERT-KU-KEYENCIPHERMENT-ONLY"}},
      // private-key-container/import
      {"der-mut-mldsa44-key-both-mismatch", "openssl-mldsa44-ee-key", S::private_key_import,
       F::inter_field_consistency, Steps{at("private-key-both-seed-expanded-mismatch", 0)},
       Ids{"private-key-both-seed-expanded-mismatch"}, Ids{"MLDSA-PRIVATE-BOTH-CONSISTENCY"}},
      {"der-mut-mldsa44-key-expanded-short", "openssl-mldsa44-ee-key", S::private_key_import, F::size_shape,
       Steps{sized("private-key-expanded-length-short", 1)}, Ids{"private-key-expanded-length-short"},
       Ids{"MLDSA-PRIVATE-EXPANDED-LENGTH"}},
      {"der-mut-mldsa44-key-seed-short", "openssl-mldsa44-ee-key", S::private_key_import, F::size_shape,
       Steps{sized("private-key-seed-length-short", 1)}, Ids{"private-key-seed-length-short"},
       Ids{"MLDSA-PRIVATE-SEED-LENGTH"}},
      {"der-mut-mlkem512-key-both-mismatch", "openssl-mlkem512-ee-key", S::private_key_import,
       F::inter_field_consistency, Steps{at("private-key-both-seed-expanded-mismatch", 0)},
       Ids{"private-key-both-seed-expanded-mismatch"}, Ids{"MLKEM-PRIVATE-BOTH-CONSISTENCY"}},
      {"der-mut-mlkem512-key-expanded-short", "openssl-mlkem512-ee-key", S::private_key_import, F::size_shape,
       Steps{sized("private-key-expanded-length-short", 1)}, Ids{"private-key-expanded-length-short"},
       Ids{"MLKEM-PRIVATE-EXPANDED-LENGTH"}},
      {"der-mut-mlkem512-key-hash-mismatch", "openssl-mlkem512-ee-key", S::private_key_import, F::import_validation,
       Steps{at("mlkem-expanded-key-hash-mismatch", 0)}, Ids{"mlkem-expanded-key-hash-mismatch"},
       Ids{"MLKEM-PRIVATE-EXPANDED-HASH-CHECK", "MLKEM-PRIVATE-BOTH-CONSISTENCY"}},
      {"der-mut-mlkem512-key-seed-short", "openssl-mlkem512-ee-key", S::private_key_import, F::size_shape,
       Steps{sized("private-key-seed-length-short", 1)}, Ids{"private-key-seed-length-short"},
       Ids{"MLKEM-PRIVATE-SEED-LENGTH"}},
  };
  return roster;
}

// ---------------------------------------------------------------------------
// Generation

inline ManifestEntry write_artifact(const fs::path& out_dir, ManifestEntry entry, ByteView der_bytes) {
  const std::string pem_text = pem::encode(pem_label(entry.artifact_type), der_bytes);
  write_file(out_dir / entry.path, pem_text);
  entry.sha256 = to_hex(sha256(to_bytes(pem_text)));
  return entry;
}

inline std::vector<ManifestEntry> generate_valid_corpus(const fs::path& out_dir) {
  std::vector<ManifestEntry> entries;
  for (auto& a : forge_valid()) entries.push_back(write_artifact(out_dir, a.entry, a.der));
  return entries;
}

inline std::vector<ManifestEntry> generate_invalid_corpus(const std::vector<ManifestEntry>& valid,
                                                          const fs::path& out_dir) {
  std::map<std::string, const ManifestEntry*> parents;
  for (const auto& e : valid) parents[e.artifact_id] = &e;
  std::vector<ManifestEntry> entries;
  for (const auto& spec : invalid_roster()) {
    auto it = parents.find(spec.parent_id);
    if (it == parents.end()) throw MutationError("missing-valid-parent", spec.parent_id);
    const ManifestEntry& parent = *it->second;
    const Bytes parent_der = pem::to_der(read_file(out_dir / parent.path), pem_label(parent.artifact_type));
    const Bytes mutated = apply_mutation(spec, parent_der, parent.artifact_type);

    ManifestEntry e;
    e.artifact_id = spec.artifact_id;
    e.path = spec.path();
    e.artifact_type = parent.artifact_type;
    e.stage = spec.stage;
    std::tie(e.algorithm, e.parameter_set) = claimed_algorithm(parent.artifact_type, mutated);
    e.valid = false;
    std::string chain;
    for (const auto& s : spec.steps) chain += (chain.empty() ? "" : " then ") + s.op;
    e.source_note = spec.origin() + " mutation of " + spec.parent_id + ": " + chain;
    e.fault_family = spec.family;
    e.mutation_tokens = spec.tokens;
    e.expected_detection = spec.expected_detection;
    entries.push_back(write_artifact(out_dir, std::move(e), mutated));
  }
  return entries;
}

// Writes valid/, mutated/ and manifest.jsonl under `corpus_dir`.
inline std::vector<ManifestEntry> generate_corpus(const fs::path& corpus_dir) {
  auto entries = generate_valid_corpus(corpus_dir);
  auto invalid = generate_invalid_corpus(entries, corpus_dir);
  entries.insert(entries.end(), invalid.begin(), invalid.end());
  std::sort(entries.begin(), entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.artifact_id < b.artifact_id; });
  write_manifest(entries, corpus_dir / "manifest.jsonl");
  return entries;
}

}  // namespace pqassure::corpus
