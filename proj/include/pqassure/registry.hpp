#pragma once

// The pkix-core requirement registry: record schema, the compiled-in 17-row
// profile, JSON round-trip and topology validation.

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace pqassure {

// ---------------------------------------------------------------------------
// Enumerations with stable string tokens

template <typename E>
struct EnumNames;

template <typename E>
std::string_view name_of(E value) {
  for (const auto& [v, n] : EnumNames<E>::table) {
    if (v == value) return n;
  }
  return "?";
}

template <typename E>
std::optional<E> parse_enum(std::string_view token) {
  for (const auto& [v, n] : EnumNames<E>::table) {
    if (n == token) return v;
  }
  return std::nullopt;
}

enum class Algorithm { ml_kem, ml_dsa };
enum class ArtifactType { certificate, spki, private_key_container };
enum class Stage { certificate_profile, spki_public_key, private_key_import, runtime_consumer };
enum class Owner { ca_preissuance, artifact_importer, runtime_consumer };
enum class GatePack { ca_certificate_profile, ca_spki_public_key, import_private_key };
enum class FaultFamily {
  encoding_container,
  size_shape,
  inter_field_consistency,
  profile_usage_policy,
  field_domain,
  algorithm_policy,
  import_validation,
};
enum class DetectorKind { structural, policy, import_crypto };
enum class Strength { must, should };
enum class Action { block, warn };
enum class Mode { strict, deployable };

template <>
struct EnumNames<Algorithm> {
  static constexpr std::array<std::pair<Algorithm, std::string_view>, 2> table{{
      {Algorithm::ml_kem, "ML-KEM"},
      {Algorithm::ml_dsa, "ML-DSA"},
  }};
};
template <>
struct EnumNames<ArtifactType> {
  static constexpr std::array<std::pair<ArtifactType, std::string_view>, 3> table{{
      {ArtifactType::certificate, "certificate"},
      {ArtifactType::spki, "spki"},
      {ArtifactType::private_key_container, "private-key-container"},
  }};
};
template <>
struct EnumNames<Stage> {
  static constexpr std::array<std::pair<Stage, std::string_view>, 4> table{{
      {Stage::certificate_profile, "certificate/profile"},
      {Stage::spki_public_key, "SPKI/public-key"},
      {Stage::private_key_import, "private-key-container/import"},
      {Stage::runtime_consumer, "runtime-consumer"},
  }};
};
template <>
struct EnumNames<Owner> {
  static constexpr std::array<std::pair<Owner, std::string_view>, 3> table{{
      {Owner::ca_preissuance, "ca-preissuance"},
      {Owner::artifact_importer, "artifact-importer"},
      {Owner::runtime_consumer, "runtime-consumer"},
  }};
};
template <>
struct EnumNames<GatePack> {
  static constexpr std::array<std::pair<GatePack, std::string_view>, 3> table{{
      {GatePack::ca_certificate_profile, "ca-certificate-profile"},
      {GatePack::ca_spki_public_key, "ca-spki-public-key"},
      {GatePack::import_private_key, "import-private-key"},
  }};
};
template <>
struct EnumNames<FaultFamily> {
  static constexpr std::array<std::pair<FaultFamily, std::string_view>, 7> table{{
      {FaultFamily::encoding_container, "encoding/container"},
      {FaultFamily::size_shape, "size/shape"},
      {FaultFamily::inter_field_consistency, "inter-field-consistency"},
      {FaultFamily::profile_usage_policy, "profile/usage-policy"},
      {FaultFamily::field_domain, "field-domain"},
      {FaultFamily::algorithm_policy, "algorithm-policy"},
      {FaultFamily::import_validation, "import-validation"},
  }};
};
template <>
struct EnumNames<DetectorKind> {
  static constexpr std::array<std::pair<DetectorKind, std::string_view>, 3> table{{
      {DetectorKind::structural, "structural"},
      {DetectorKind::policy, "policy"},
      {DetectorKind::import_crypto, "import-crypto"},
  }};
};
template <>
struct EnumNames<Strength> {
  static constexpr std::array<std::pair<Strength, std::string_view>, 2> table{{
      {Strength::must, "must"},
      {Strength::should, "should"},
  }};
};
template <>
struct EnumNames<Action> {
  static constexpr std::array<std::pair<Action, std::string_view>, 2> table{{
      {Action::block, "block"},
      {Action::warn, "warn"},
  }};
};
template <>
struct EnumNames<Mode> {
  static constexpr std::array<std::pair<Mode, std::string_view>, 2> table{{
      {Mode::strict, "strict"},
      {Mode::deployable, "deployable"},
  }};
};

inline constexpr std::array<Mode, 2> kModes = {Mode::strict, Mode::deployable};
inline constexpr std::array<GatePack, 3> kGatePacks = {GatePack::ca_certificate_profile, GatePack::ca_spki_public_key,
                                                       GatePack::import_private_key};

// A gate pack fixes one owner, one stage and one artifact surface.
struct PackPlacement {
  Owner owner;
  Stage stage;
  ArtifactType artifact_type;
};

inline PackPlacement placement_of(GatePack pack) {
  switch (pack) {
    case GatePack::ca_certificate_profile:
      return {Owner::ca_preissuance, Stage::certificate_profile, ArtifactType::certificate};
    case GatePack::ca_spki_public_key:
      return {Owner::ca_preissuance, Stage::spki_public_key, ArtifactType::spki};
    case GatePack::import_private_key:
      return {Owner::artifact_importer, Stage::private_key_import, ArtifactType::private_key_container};
  }
  throw std::logic_error("unhandled gate pack");
}

// ---------------------------------------------------------------------------
// Records

struct RequirementRecord {
  std::string id;
  Algorithm algorithm = Algorithm::ml_kem;
  ArtifactType artifact_type = ArtifactType::certificate;
  Stage stage = Stage::certificate_profile;
  Owner owner = Owner::ca_preissuance;
  GatePack gate_pack = GatePack::ca_certificate_profile;
  FaultFamily fault_family = FaultFamily::encoding_container;
  std::string requirement;
  std::string expected_detector;
  DetectorKind detector_kind = DetectorKind::structural;
  Strength normative_strength = Strength::must;
  std::string baseline_status;
  std::string constructibility = "covered";
  std::map<Mode, Action> mode_action;
  std::string severity = "error";
  std::string source;
  std::vector<std::string> source_locators;
  std::string justification;

  std::optional<Action> action(Mode m) const {
    auto it = mode_action.find(m);
    return it == mode_action.end() ? std::nullopt : std::optional<Action>(it->second);
  }
};

struct Registry {
  std::string profile = "pkix-core";
  std::string version;
  std::vector<RequirementRecord> records;  // kept sorted by id

  const RequirementRecord* find(std::string_view id) const {
    auto it = std::lower_bound(records.begin(), records.end(), id,
                               [](const RequirementRecord& r, std::string_view k) { return r.id < k; });
    return (it != records.end() && it->id == id) ? &*it : nullptr;
  }
  bool contains(std::string_view id) const { return find(id) != nullptr; }

  void sort() {
    std::stable_sort(records.begin(), records.end(),
                     [](const RequirementRecord& a, const RequirementRecord& b) { return a.id < b.id; });
  }

  Registry subset(GatePack pack) const {
    Registry out{profile, version, {}};
    for (const auto& r : records) {
      if (r.gate_pack == pack) out.records.push_back(r);
    }
    return out;
  }
};

namespace detail {

struct RowSpec {
  const char* id;
  Algorithm algorithm;
  GatePack pack;
  FaultFamily family;
  DetectorKind kind;
  Strength strength;
  Action deployable;
  const char* detector;
  const char* baseline;
  const char* requirement;
  const char* source;
  std::vector<std::string> locators;
  const char* justification;
};

inline RequirementRecord make_record(const RowSpec& s) {
  RequirementRecord r;
  const auto place = placement_of(s.pack);
  r.id = s.id;
  r.algorithm = s.algorithm;
  r.artifact_type = place.artifact_type;
  r.stage = place.stage;
  r.owner = place.owner;
  r.gate_pack = s.pack;
  r.fault_family = s.family;
  r.requirement = s.requirement;
  r.expected_detector = s.detector;
  r.detector_kind = s.kind;
  r.normative_strength = s.strength;
  r.baseline_status = s.baseline;
  r.mode_action = {{Mode::strict, Action::block}, {Mode::deployable, s.deployable}};
  r.severity = s.deployable == Action::warn ? "warning" : "error";
  r.source = s.source;
  r.source_locators = s.locators;
  r.justification = s.justification;
  return r;
}

}  // namespace detail

inline Registry builtin_registry() {
  using A = Algorithm;
  using G = GatePack;
  using F = FaultFamily;
  using K = DetectorKind;
  using S = Strength;
  const std::vector<detail::RowSpec> rows = {
      // CA certificate/profile
      {"MLKEM-CERT-KU-KEYENCIPHERMENT-ONLY", A::ml_kem, G::ca_certificate_profile, F::profile_usage_policy,
       K::policy, S::must, Action::block, "cert.keyusage.mlkem-keyencipherment-only", "incomplete",
       "When keyUsage is present on an ML-KEM certificate, keyEncipherment is the only bit asserted.",
       "RFC 9935", {"RFC 9935, certificate keyUsage for ML-KEM subject keys"},
       "A KEM key cannot sign or agree; any other asserted usage misdescribes the key to relying parties."},
      {"MLDSA-CERT-SIGNATURE-AID-PARAMS-ABSENT", A::ml_dsa, G::ca_certificate_profile, F::encoding_container,
       K::structural, S::must, Action::block, "cert.signature-aid.mldsa-params-absent", "partial",
       "ML-DSA signature AlgorithmIdentifiers omit parameters in both tbsCertificate.signature and the outer "
       "signatureAlgorithm.",
       "RFC 9881", {"RFC 9881, ML-DSA signature algorithm identifiers", "RFC 5280, Certificate signatureAlgorithm"},
       "Parameter encodings outside the profile break byte-exact AlgorithmIdentifier matching in verifiers."},
      {"MLDSA-CERT-KU-AT-LEAST-ONE-SIGNING-BIT", A::ml_dsa, G::ca_certificate_profile, F::profile_usage_policy,
       K::policy, S::must, Action::block, "cert.keyusage.mldsa-signing-bit-present", "incomplete",
       "When keyUsage is present on an ML-DSA certificate, at least one of digitalSignature, nonRepudiation, "
       "keyCertSign or cRLSign is asserted.",
       "RFC 9881", {"RFC 9881, certificate keyUsage for ML-DSA subject keys"},
       "A signature key whose usage list grants no signing operation is unusable and signals a profile error."},
      {"MLDSA-CERT-KU-NO-ENCIPHERMENT-OR-AGREEMENT", A::ml_dsa, G::ca_certificate_profile,
       F::profile_usage_policy, K::policy, S::must, Action::block, "cert.keyusage.mldsa-no-encipherment",
       "covered-for-prohibited-bits",
       "ML-DSA certificates assert none of keyEncipherment, dataEncipherment, keyAgreement, encipherOnly or "
       "decipherOnly.",
       "RFC 9881", {"RFC 9881, certificate keyUsage for ML-DSA subject keys"},
       "ML-DSA keys have no encryption or agreement operation; asserting one invites cross-protocol misuse."},
      {"MLDSA-PKIX-HASHML-FORBIDDEN", A::ml_dsa, G::ca_certificate_profile, F::algorithm_policy, K::policy,
       S::must, Action::block, "cert.signature-aid.hashmldsa-forbidden", "gap",
       "Certificate signature AlgorithmIdentifiers never carry a HashML-DSA OID.",
       "RFC 9881", {"RFC 9881, exclusion of pre-hash ML-DSA from X.509 signatures"},
       "The covered profile admits only pure ML-DSA certificate signatures; pre-hash variants are out of profile."},
      // CA SPKI/public-key
      {"MLKEM-SPKI-AID-PARAMS-ABSENT", A::ml_kem, G::ca_spki_public_key, F::encoding_container, K::structural,
       S::must, Action::block, "spki.aid.mlkem-params-absent", "partial",
       "An ML-KEM subjectPublicKeyInfo AlgorithmIdentifier carries the ML-KEM OID with the parameters field "
       "omitted.",
       "RFC 9935", {"RFC 9935, ML-KEM AlgorithmIdentifier"},
       "NULL or other parameters produce a second encoding of the same key type that strict matchers reject."},
      {"MLKEM-SPKI-PUBLIC-KEY-LENGTH", A::ml_kem, G::ca_spki_public_key, F::size_shape, K::structural, S::must,
       Action::block, "spki.public-key.mlkem-length", "covered-for-encoded-key",
       "The ML-KEM subjectPublicKey payload is exactly 800, 1184 or 1568 octets for ML-KEM-512, -768 or -1024.",
       "RFC 9935; FIPS 203", {"RFC 9935, ML-KEM public key encoding", "FIPS 203, ML-KEM parameter sets"},
       "A payload whose size disagrees with its OID cannot be decoded as the named parameter set."},
      {"MLKEM-SPKI-ENCODE-DECODE-IDENTITY", A::ml_kem, G::ca_spki_public_key, F::field_domain, K::structural,
       S::must, Action::warn, "spki.public-key.mlkem-canonical", "covered-by-external-lint-path",
       "Every 12-bit coefficient packed in the ML-KEM encapsulation key is below q = 3329, so decoding and "
       "re-encoding reproduces the key bytes.",
       "FIPS 203; RFC 9935", {"FIPS 203, encapsulation key modulus check", "RFC 9935, ML-KEM public key encoding"},
       "Unreduced coefficients are rejected by conforming encapsulators; deployable mode holds the artifact "
       "for review instead of blocking."},
      {"MLDSA-SPKI-AID-PARAMS-ABSENT", A::ml_dsa, G::ca_spki_public_key, F::encoding_container, K::structural,
       S::must, Action::block, "spki.aid.mldsa-params-absent", "partial",
       "An ML-DSA subjectPublicKeyInfo AlgorithmIdentifier carries the ML-DSA OID with the parameters field "
       "omitted.",
       "RFC 9881", {"RFC 9881, ML-DSA AlgorithmIdentifier"},
       "NULL or other parameters produce a second encoding of the same key type that strict matchers reject."},
      {"MLDSA-SPKI-PUBLIC-KEY-LENGTH", A::ml_dsa, G::ca_spki_public_key, F::size_shape, K::structural, S::must,
       Action::block, "spki.public-key.mldsa-length", "gap-or-unverified",
       "The ML-DSA subjectPublicKey payload is exactly 1312, 1952 or 2592 octets for ML-DSA-44, -65 or -87.",
       "RFC 9881; FIPS 204", {"RFC 9881, ML-DSA public key encoding", "FIPS 204, ML-DSA parameter sets"},
       "A payload whose size disagrees with its OID cannot be decoded as the named parameter set."},
      // Importer private-key-container/import
      {"MLKEM-PRIVATE-SEED-LENGTH", A::ml_kem, G::import_private_key, F::size_shape, K::structural, S::must,
       Action::block, "private-key.seed.mlkem-length", "gap",
       "An ML-KEM seed-form private key holds exactly 64 octets (d followed by z).",
       "RFC 9935; FIPS 203", {"RFC 9935, ML-KEM private key CHOICE", "FIPS 203, key generation seed"},
       "A seed of the wrong size cannot regenerate the key pair and must be refused at import."},
      {"MLKEM-PRIVATE-EXPANDED-LENGTH", A::ml_kem, G::import_private_key, F::size_shape, K::structural, S::must,
       Action::block, "private-key.expanded.mlkem-length", "gap",
       "An ML-KEM expanded private key is exactly 1632, 2400 or 3168 octets for ML-KEM-512, -768 or -1024.",
       "RFC 9935; FIPS 203", {"RFC 9935, ML-KEM private key CHOICE", "FIPS 203, decapsulation key layout"},
       "Field offsets inside the decapsulation key are fixed by its length; a short key misplaces every field."},
      {"MLKEM-PRIVATE-BOTH-CONSISTENCY", A::ml_kem, G::import_private_key, F::inter_field_consistency,
       K::import_crypto, S::should, Action::block, "private-key.both.mlkem-consistency", "gap",
       "In the both form, the ML-KEM expanded key equals the expansion of the accompanying seed.",
       "RFC 9935", {"RFC 9935, ML-KEM private key consistency on import"},
       "Two disagreeing representations of one key leave the importer unable to tell which one is authoritative."},
      {"MLKEM-PRIVATE-EXPANDED-HASH-CHECK", A::ml_kem, G::import_private_key, F::import_validation,
       K::import_crypto, S::must, Action::block, "private-key.expanded.mlkem-hash-check", "gap",
       "The SHA3-256 digest of the encapsulation key embedded in an ML-KEM expanded key equals the stored "
       "digest field.",
       "FIPS 203; RFC 9935", {"FIPS 203, decapsulation key hash check", "RFC 9935, ML-KEM private key import"},
       "The stored digest binds the embedded public key; a mismatch means the key was altered or mis-assembled."},
      {"MLDSA-PRIVATE-SEED-LENGTH", A::ml_dsa, G::import_private_key, F::size_shape, K::structural, S::must,
       Action::block, "private-key.seed.mldsa-length", "gap",
       "An ML-DSA seed-form private key holds exactly 32 octets.",
       "RFC 9881; FIPS 204", {"RFC 9881, ML-DSA private key CHOICE", "FIPS 204, key generation seed"},
       "A seed of the wrong size cannot regenerate the key pair and must be refused at import."},
      {"MLDSA-PRIVATE-EXPANDED-LENGTH", A::ml_dsa, G::import_private_key, F::size_shape, K::structural, S::must,
       Action::block, "private-key.expanded.mldsa-length", "gap",
       "An ML-DSA expanded private key is exactly 2560, 4032 or 4896 octets for ML-DSA-44, -65 or -87.",
       "RFC 9881; FIPS 204", {"RFC 9881, ML-DSA private key CHOICE", "FIPS 204, private key encoding"},
       "Field offsets inside the expanded key are fixed by its length; a short key misplaces every field."},
      {"MLDSA-PRIVATE-BOTH-CONSISTENCY", A::ml_dsa, G::import_private_key, F::inter_field_consistency,
       K::import_crypto, S::should, Action::block, "private-key.both.mldsa-consistency", "gap",
       "In the both form, the ML-DSA expanded key equals the expansion of the accompanying seed.",
       "RFC 9881", {"RFC 9881, ML-DSA private key consistency on import"},
       "Two disagreeing representations of one key leave the importer unable to tell which one is authoritative."},
  };
  Registry reg;
  reg.profile = "pkix-core";
  reg.version = "pkix-core-1";
  for (const auto& row : rows) reg.records.push_back(detail::make_record(row));
  reg.sort();
  return reg;
}

// ---------------------------------------------------------------------------
// JSON

class RegistryError : public std::runtime_error {
 public:
  RegistryError(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

inline nlohmann::json to_json(const RequirementRecord& r) {
  nlohmann::json actions = nlohmann::json::object();
  for (const auto& [m, a] : r.mode_action) actions[std::string(name_of(m))] = std::string(name_of(a));
  return {
      {"id", r.id},
      {"algorithm", name_of(r.algorithm)},
      {"artifact_type", name_of(r.artifact_type)},
      {"stage", name_of(r.stage)},
      {"owner", name_of(r.owner)},
      {"gate_pack", name_of(r.gate_pack)},
      {"fault_family", name_of(r.fault_family)},
      {"requirement", r.requirement},
      {"expected_detector", r.expected_detector},
      {"detector_kind", name_of(r.detector_kind)},
      {"normative_strength", name_of(r.normative_strength)},
      {"baseline_status", r.baseline_status},
      {"constructibility", r.constructibility},
      {"mode_action", actions},
      {"severity", r.severity},
      {"source", r.source},
      {"source_locators", r.source_locators},
      {"justification", r.justification},
  };
}

inline nlohmann::json to_json(const Registry& reg) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : reg.records) records.push_back(to_json(r));
  return {{"profile", reg.profile}, {"version", reg.version}, {"records", records}};
}

namespace detail {

inline const nlohmann::json& field(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw RegistryError("schema-mismatch", where + ": missing " + key);
  return obj.at(key);
}

inline std::string string_field(const nlohmann::json& obj, const char* key, const std::string& where) {
  const auto& v = field(obj, key, where);
  if (!v.is_string()) throw RegistryError("schema-mismatch", where + "." + key + " is not a string");
  return v.get<std::string>();
}

template <typename E>
E enum_field(const nlohmann::json& obj, const char* key, const std::string& where) {
  const auto token = string_field(obj, key, where);
  auto v = parse_enum<E>(token);
  if (!v) throw RegistryError("schema-mismatch", where + "." + key + ": unknown value '" + token + "'");
  return *v;
}

}  // namespace detail

inline RequirementRecord record_from_json(const nlohmann::json& j) {
  using namespace detail;
  RequirementRecord r;
  const std::string where = j.is_object() && j.contains("id") && j["id"].is_string()
                                ? j["id"].get<std::string>()
                                : std::string("record");
  r.id = string_field(j, "id", where);
  r.algorithm = enum_field<Algorithm>(j, "algorithm", where);
  r.artifact_type = enum_field<ArtifactType>(j, "artifact_type", where);
  r.stage = enum_field<Stage>(j, "stage", where);
  r.owner = enum_field<Owner>(j, "owner", where);
  r.gate_pack = enum_field<GatePack>(j, "gate_pack", where);
  r.fault_family = enum_field<FaultFamily>(j, "fault_family", where);
  r.requirement = string_field(j, "requirement", where);
  r.expected_detector = string_field(j, "expected_detector", where);
  r.detector_kind = enum_field<DetectorKind>(j, "detector_kind", where);
  r.normative_strength = enum_field<Strength>(j, "normative_strength", where);
  r.baseline_status = string_field(j, "baseline_status", where);
  r.constructibility = string_field(j, "constructibility", where);
  const auto& actions = field(j, "mode_action", where);
  if (!actions.is_object()) throw RegistryError("schema-mismatch", where + ".mode_action is not an object");
  for (const auto& [k, v] : actions.items()) {
    auto m = parse_enum<Mode>(k);
    if (!m) throw RegistryError("schema-mismatch", where + ".mode_action: unknown mode '" + k + "'");
    if (!v.is_string()) throw RegistryError("schema-mismatch", where + ".mode_action." + k + " is not a string");
    auto a = parse_enum<Action>(v.get<std::string>());
    if (!a) throw RegistryError("schema-mismatch", where + ".mode_action." + k + ": unknown action");
    r.mode_action[*m] = *a;
  }
  r.severity = string_field(j, "severity", where);
  r.source = string_field(j, "source", where);
  const auto& locs = field(j, "source_locators", where);
  if (!locs.is_array()) throw RegistryError("schema-mismatch", where + ".source_locators is not an array");
  for (const auto& l : locs) {
    if (!l.is_string()) throw RegistryError("schema-mismatch", where + ".source_locators entry is not a string");
    r.source_locators.push_back(l.get<std::string>());
  }
  r.justification = string_field(j, "justification", where);
  return r;
}

// Records are sorted by id after loading; duplicates survive so validation can report them.
inline Registry registry_from_json(const nlohmann::json& j) {
  Registry reg;
  reg.profile = detail::string_field(j, "profile", "registry");
  reg.version = detail::string_field(j, "version", "registry");
  const auto& records = detail::field(j, "records", "registry");
  if (!records.is_array()) throw RegistryError("schema-mismatch", "registry.records is not an array");
  for (const auto& rj : records) reg.records.push_back(record_from_json(rj));
  reg.sort();
  return reg;
}

inline Registry load_registry(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RegistryError("io-failure", "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw RegistryError("schema-mismatch", path + ": " + e.what());
  }
  return registry_from_json(j);
}

inline std::string dump_registry(const Registry& reg) { return to_json(reg).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Validation

struct Violation {
  std::string kind;
  std::string record_id;  // "*" for profile-level checks
  std::string field;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::size_t record_count = 0;

  bool clean() const { return violations.empty(); }
  std::size_t count(std::string_view kind) const {
    return static_cast<std::size_t>(
        std::count_if(violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == kind; }));
  }
};

// Profile-level totals a registry must reproduce.
struct ProfileExpectations {
  std::string profile = "pkix-core";
  std::size_t records = 17;
  std::map<Owner, std::size_t> owners = {
      {Owner::ca_preissuance, 10}, {Owner::artifact_importer, 7}, {Owner::runtime_consumer, 0}};
  std::map<GatePack, std::size_t> packs = {
      {GatePack::ca_certificate_profile, 5}, {GatePack::ca_spki_public_key, 5}, {GatePack::import_private_key, 7}};
  std::map<DetectorKind, std::size_t> kinds = {
      {DetectorKind::structural, 10}, {DetectorKind::policy, 4}, {DetectorKind::import_crypto, 3}};
  std::map<Strength, std::size_t> strengths = {{Strength::must, 15}, {Strength::should, 2}};
  std::set<std::string> deployable_warn = {"MLKEM-SPKI-ENCODE-DECODE-IDENTITY"};

  static ProfileExpectations pkix_core() { return {}; }
};

namespace detail {

inline bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

template <typename E>
void check_counts(ValidationReport& rep, const char* field, const std::map<E, std::size_t>& expected,
                  const std::map<E, std::size_t>& actual) {
  for (const auto& [key, want] : expected) {
    auto it = actual.find(key);
    const std::size_t got = it == actual.end() ? 0 : it->second;
    if (got != want) {
      rep.violations.push_back({"count-violation", "*", field,
                                std::string(name_of(key)) + " has " + std::to_string(got) + " records, expected " +
                                    std::to_string(want)});
    }
  }
}

}  // namespace detail

inline ValidationReport validate_registry(const Registry& reg,
                                          const ProfileExpectations& expect = ProfileExpectations::pkix_core()) {
  ValidationReport rep;
  rep.record_count = reg.records.size();
  auto add = [&](std::string kind, const std::string& id, std::string field, std::string msg) {
    rep.violations.push_back({std::move(kind), id, std::move(field), std::move(msg)});
  };

  if (reg.profile != expect.profile) add("schema-mismatch", "*", "profile", "profile is '" + reg.profile + "'");

  std::set<std::string> seen;
  std::map<Owner, std::size_t> owners;
  std::map<GatePack, std::size_t> packs;
  std::map<DetectorKind, std::size_t> kinds;
  std::map<Strength, std::size_t> strengths;
  std::set<std::string> deployable_warn;
  std::size_t strict_block = 0;

  for (const auto& r : reg.records) {
    if (r.id.empty()) add("schema-mismatch", r.id, "id", "empty requirement id");
    if (!seen.insert(r.id).second) add("schema-mismatch", r.id, "id", "duplicate requirement id");
    const std::string_view prefix = r.algorithm == Algorithm::ml_kem ? "MLKEM-" : "MLDSA-";
    if (r.id.rfind(prefix, 0) != 0) {
      add("schema-mismatch", r.id, "algorithm", "id prefix disagrees with algorithm " + std::string(name_of(r.algorithm)));
    }
    if (detail::blank(r.requirement)) add("schema-mismatch", r.id, "requirement", "empty requirement clause");

    const auto place = placement_of(r.gate_pack);
    if (r.owner != place.owner) {
      add("topology-violation", r.id, "owner",
          std::string(name_of(r.owner)) + " cannot own gate pack " + std::string(name_of(r.gate_pack)));
    }
    if (r.stage != place.stage) {
      add("topology-violation", r.id, "stage",
          std::string(name_of(r.stage)) + " is not the stage of gate pack " + std::string(name_of(r.gate_pack)));
    }
    if (r.artifact_type != place.artifact_type) {
      add("topology-violation", r.id, "artifact_type",
          std::string(name_of(r.artifact_type)) + " is not the surface of gate pack " +
              std::string(name_of(r.gate_pack)));
    }

    for (auto m : kModes) {
      if (!r.action(m)) add("missing-mode-action", r.id, "mode_action", "no action for " + std::string(name_of(m)));
    }
    const auto strict = r.action(Mode::strict);
    const auto deploy = r.action(Mode::deployable);
    if (strict == Action::warn && deploy == Action::block) {
      add("mode-monotonicity-violation", r.id, "mode_action", "deployable blocks where strict only warns");
    }
    if (strict == Action::block) ++strict_block;
    if (deploy == Action::warn) deployable_warn.insert(r.id);

    if (detail::blank(r.justification)) add("empty-justification", r.id, "justification", "justification is empty");
    if (r.constructibility != "covered") {
      add("constructibility-violation", r.id, "constructibility",
          "'" + r.constructibility + "' records are not admitted to the active profile");
    }

    ++owners[r.owner];
    ++packs[r.gate_pack];
    ++kinds[r.detector_kind];
    ++strengths[r.normative_strength];
  }

  if (reg.records.size() != expect.records) {
    add("count-violation", "*", "records",
        std::to_string(reg.records.size()) + " records, expected " + std::to_string(expect.records));
  }
  detail::check_counts(rep, "owner", expect.owners, owners);
  detail::check_counts(rep, "gate_pack", expect.packs, packs);
  detail::check_counts(rep, "detector_kind", expect.kinds, kinds);
  detail::check_counts(rep, "normative_strength", expect.strengths, strengths);
  if (strict_block != reg.records.size()) {
    add("policy-violation", "*", "mode_action",
        std::to_string(reg.records.size() - strict_block) + " records do not block in strict mode");
  }
  if (deployable_warn != expect.deployable_warn) {
    std::string got;
    for (const auto& id : deployable_warn) got += (got.empty() ? "" : ",") + id;
    add("policy-violation", "*", "mode_action", "deployable warn set is {" + got + "}");
  }
  return rep;
}

inline nlohmann::json to_json(const ValidationReport& rep) {
  nlohmann::json v = nlohmann::json::array();
  for (const auto& x : rep.violations) {
    v.push_back({{"kind", x.kind}, {"record_id", x.record_id}, {"field", x.field}, {"message", x.message}});
  }
  return {{"records", rep.record_count}, {"clean", rep.clean()}, {"violations", v}};
}

}  // namespace pqassure
