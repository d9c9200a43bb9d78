#pragma once

// The executable checks. Each detector reads one parsed artifact and emits
// requirement-tagged findings, restricted to the IDs present in the registry
// it is handed; evaluating a gate pack therefore only needs a sub-registry.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "pqassure/mlkem_codec.hpp"
#include "pqassure/pkix.hpp"
#include "pqassure/registry.hpp"
#include "pqassure/substrate.hpp"

namespace pqassure::detect {

struct Finding {
  std::string requirement_id;
  std::string locus;
  std::string detail;
  DetectorKind detector_kind = DetectorKind::structural;

  bool operator==(const Finding&) const = default;
};

struct DetectionResult {
  std::string artifact_id;
  std::vector<Finding> findings;
  std::vector<std::string> unique_requirements;  // first-occurrence order
  std::optional<std::string> first_hit;
  std::optional<std::string> evaluation_error;  // e.g. bridge failure; never a pass

  void add(Finding f) {
    if (!first_hit) first_hit = f.requirement_id;
    if (std::find(unique_requirements.begin(), unique_requirements.end(), f.requirement_id) ==
        unique_requirements.end()) {
      unique_requirements.push_back(f.requirement_id);
    }
    findings.push_back(std::move(f));
  }

  void merge(const DetectionResult& other) {
    for (const auto& f : other.findings) add(f);
    if (!evaluation_error && other.evaluation_error) evaluation_error = other.evaluation_error;
  }

  std::size_t redundant_count() const { return findings.size() - unique_requirements.size(); }
};

namespace detail {

class Sink {
 public:
  Sink(const Registry& reg, DetectionResult& out) : reg_(reg), out_(out) {}

  bool active(const std::string& id) const { return reg_.contains(id); }

  void emit(const std::string& id, std::string locus, std::string detail) {
    const auto* rec = reg_.find(id);
    if (!rec) return;
    out_.add({id, std::move(locus), std::move(detail), rec->detector_kind});
  }

 private:
  const Registry& reg_;
  DetectionResult& out_;
};

inline std::string prefix_for(pkix::Family f) { return f == pkix::Family::ml_kem ? "MLKEM-" : "MLDSA-"; }

inline std::string describe_params(const pkix::AlgorithmIdentifierView& aid) {
  if (aid.parameters == pkix::ParamsKind::null_present) return "parameters encoded as NULL";
  return "parameters present: " + to_hex(aid.parameter_bytes);
}

inline std::string length_detail(std::size_t got, std::size_t want, std::string_view what, std::string_view ps) {
  return std::string(what) + " is " + std::to_string(got) + " bytes; " + std::string(ps) + " requires " +
         std::to_string(want);
}

}  // namespace detail

// SPKI checks: parameter absence, payload length, then ML-KEM canonicality.
// A wrong-length key is never decoded.
inline DetectionResult detect_spki(const pkix::SpkiView& spki, const Registry& reg) {
  DetectionResult out;
  detail::Sink sink(reg, out);
  const auto* entry = spki.catalog;
  if (!entry) return out;
  const std::string p = detail::prefix_for(entry->family);
  const std::string& at = spki.locus_prefix;

  if (spki.algorithm.parameters != pkix::ParamsKind::absent) {
    sink.emit(p + "SPKI-AID-PARAMS-ABSENT", at + ".algorithm.parameters", detail::describe_params(spki.algorithm));
  }

  const std::size_t want = entry->expected_public_key_len;
  if (spki.public_key.size() != want) {
    sink.emit(p + "SPKI-PUBLIC-KEY-LENGTH", at + ".subjectPublicKey",
              detail::length_detail(spki.public_key.size(), want, "public key", entry->name));
    return out;
  }

  if (entry->family == pkix::Family::ml_kem && sink.active("MLKEM-SPKI-ENCODE-DECODE-IDENTITY")) {
    const auto layout = mlkem::Layout::for_rank(pkix::mlkem_rank(entry->key_parameter_set));
    const auto c = mlkem::check_ek_canonical(spki.public_key, layout);
    if (!c.canonical) {
      sink.emit("MLKEM-SPKI-ENCODE-DECODE-IDENTITY",
                at + ".subjectPublicKey.t_hat[" + std::to_string(c.first_offending_index) + "]",
                "coefficient " + std::to_string(c.first_offending_index) + " is not reduced mod 3329 (" +
                    std::to_string(c.offending_count) + " unreduced in total)");
    }
  }
  return out;
}

namespace detail {

inline constexpr pkix::KeyUsageBits kSigningBits =
    pkix::KeyUsageBits::of({pkix::KeyUsageBit::digital_signature, pkix::KeyUsageBit::non_repudiation,
                            pkix::KeyUsageBit::key_cert_sign, pkix::KeyUsageBit::crl_sign});
inline constexpr pkix::KeyUsageBits kEnciphermentBits =
    pkix::KeyUsageBits::of({pkix::KeyUsageBit::key_encipherment, pkix::KeyUsageBit::data_encipherment,
                            pkix::KeyUsageBit::key_agreement, pkix::KeyUsageBit::encipher_only,
                            pkix::KeyUsageBit::decipher_only});
inline constexpr pkix::KeyUsageBits kKemOnly = pkix::KeyUsageBits::of({pkix::KeyUsageBit::key_encipherment});

inline bool is_signature_family(const pkix::AlgorithmIdentifierView& aid) {
  return aid.catalog &&
         (aid.catalog->family == pkix::Family::ml_dsa || aid.catalog->family == pkix::Family::hash_ml_dsa);
}

}  // namespace detail

// Certificate checks in frozen order: HashML-DSA prohibition, signature
// AlgorithmIdentifier parameters, keyUsage policy, then the embedded SPKI.
inline DetectionResult detect_certificate(const pkix::CertificateView& cert, const Registry& reg) {
  DetectionResult out;
  detail::Sink sink(reg, out);
  const std::array<const pkix::AlgorithmIdentifierView*, 2> sig_aids = {&cert.tbs_signature_aid,
                                                                        &cert.outer_signature_aid};

  std::string hashml_loci, hashml_names;
  for (const auto* aid : sig_aids) {
    if (!aid->catalog || aid->catalog->family != pkix::Family::hash_ml_dsa) continue;
    hashml_loci += (hashml_loci.empty() ? "" : ",") + aid->locus;
    hashml_names += (hashml_names.empty() ? "" : ", ") + std::string(aid->catalog->name);
  }
  if (!hashml_loci.empty()) {
    sink.emit("MLDSA-PKIX-HASHML-FORBIDDEN", hashml_loci, "pre-hash signature algorithm " + hashml_names);
  }

  for (const auto* aid : sig_aids) {
    if (detail::is_signature_family(*aid) && aid->parameters != pkix::ParamsKind::absent) {
      sink.emit("MLDSA-CERT-SIGNATURE-AID-PARAMS-ABSENT", aid->locus + ".parameters", detail::describe_params(*aid));
    }
  }

  const auto* subject = cert.spki.catalog;
  if (cert.key_usage && subject) {
    const auto ku = *cert.key_usage;
    const std::string locus = "tbs.extensions.keyUsage";
    if (subject->family == pkix::Family::ml_kem) {
      if (ku != detail::kKemOnly) {
        sink.emit("MLKEM-CERT-KU-KEYENCIPHERMENT-ONLY", locus, "keyUsage " + ku.describe());
      }
    } else {
      if ((ku.mask & detail::kSigningBits.mask) == 0) {
        sink.emit("MLDSA-CERT-KU-AT-LEAST-ONE-SIGNING-BIT", locus, "no signing bit in keyUsage " + ku.describe());
      }
      if (const auto bad = pkix::KeyUsageBits{ku.mask & detail::kEnciphermentBits.mask}; !bad.empty()) {
        sink.emit("MLDSA-CERT-KU-NO-ENCIPHERMENT-OR-AGREEMENT", locus, "prohibited bits " + bad.describe());
      }
    }
  }

  out.merge(detect_spki(cert.spki, reg));
  return out;
}

// Private-key checks: component lengths, the ML-KEM hash relation, then
// seed/expanded consistency through the substrate for the both form.
inline DetectionResult detect_private_key(const pkix::PrivateKeyContainerView& key,
                                          const substrate::Substrate& sub, const Registry& reg) {
  using pkix::PrivateKeyForm;
  DetectionResult out;
  detail::Sink sink(reg, out);
  const auto* entry = key.catalog();
  if (!entry) return out;
  const std::string p = detail::prefix_for(entry->family);
  const bool has_seed = key.form != PrivateKeyForm::expanded;
  const bool has_expanded = key.form != PrivateKeyForm::seed;

  bool lengths_ok = true;
  if (has_seed && key.seed.size() != entry->expected_seed_len) {
    lengths_ok = false;
    sink.emit(p + "PRIVATE-SEED-LENGTH", "privateKey.seed",
              detail::length_detail(key.seed.size(), entry->expected_seed_len, "seed", entry->name));
  }
  if (has_expanded && key.expanded.size() != entry->expected_expanded_len) {
    lengths_ok = false;
    sink.emit(p + "PRIVATE-EXPANDED-LENGTH", "privateKey.expanded",
              detail::length_detail(key.expanded.size(), entry->expected_expanded_len, "expanded key", entry->name));
  }

  bool hash_failed = false;
  if (entry->family == pkix::Family::ml_kem && has_expanded &&
      key.expanded.size() == entry->expected_expanded_len) {
    const auto layout = mlkem::Layout::for_rank(pkix::mlkem_rank(entry->key_parameter_set));
    if (mlkem::check_expanded_hash(key.expanded, layout) == mlkem::HashRelation::mismatch) {
      hash_failed = true;
      const std::string locus = "privateKey.expanded.h_ek";
      sink.emit("MLKEM-PRIVATE-EXPANDED-HASH-CHECK", locus, "SHA3-256 of the embedded ek differs from stored H(ek)");
      if (key.form == PrivateKeyForm::both) {
        sink.emit("MLKEM-PRIVATE-BOTH-CONSISTENCY", locus, "expanded key cannot be the expansion of any seed");
      }
    }
  }

  const std::string both_id = p + "PRIVATE-BOTH-CONSISTENCY";
  if (key.form == PrivateKeyForm::both && lengths_ok && !hash_failed && sink.active(both_id)) {
    const auto verdict = sub.check_consistency(*entry->parameter_set, key.seed, key.expanded);
    switch (verdict.kind) {
      case substrate::Verdict::consistent: break;
      case substrate::Verdict::mismatch:
        sink.emit(both_id, "privateKey.both", "expanded key differs from the expansion of the seed");
        break;
      case substrate::Verdict::bridge_failure:
        out.evaluation_error = "bridge-unavailable: " + verdict.detail;
        break;
    }
  }
  return out;
}

}  // namespace pqassure::detect
