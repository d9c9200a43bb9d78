#include <gtest/gtest.h>

#include <map>

#include "pqassure/corpus.hpp"
#include "pqassure/detectors.hpp"
#include "pqassure/evaluator.hpp"
#include "support.hpp"

using namespace pqassure;
namespace corpus = pqassure::corpus;

namespace {

const std::map<std::string, corpus::ForgedArtifact>& valid_by_id() {
  static const auto table = [] {
    std::map<std::string, corpus::ForgedArtifact> m;
    for (auto& a : corpus::forge_valid()) m.emplace(a.entry.artifact_id, a);
    return m;
  }();
  return table;
}

const corpus::MutationSpec& spec(std::string_view id) {
  for (const auto& s : corpus::invalid_roster()) {
    if (s.artifact_id == id) return s;
  }
  throw std::out_of_range(std::string(id));
}

detect::DetectionResult run(std::string_view mutated_id, const Registry& reg = builtin_registry(),
                            const substrate::Substrate& sub = substrate::Substrate::structural()) {
  const auto& s = spec(mutated_id);
  const auto& parent = valid_by_id().at(s.parent_id);
  const Bytes der = corpus::apply_mutation(s, parent.der, parent.entry.artifact_type);
  return eval::run_detectors(parent.entry.artifact_type, der, reg, sub);
}

}  // namespace

TEST(Detectors, ValidArtifactsProduceNoFindings) {
  const auto reg = builtin_registry();
  for (const auto& [id, a] : valid_by_id()) {
    const auto r = eval::run_detectors(a.entry.artifact_type, a.der, reg, substrate::Substrate::structural());
    EXPECT_TRUE(r.findings.empty()) << id;
    EXPECT_FALSE(r.evaluation_error) << id;
  }
}

TEST(Detectors, EveryRosterEntryHitsExactlyItsExpectedSet) {
  for (const auto& s : corpus::invalid_roster()) {
    const auto r = run(s.artifact_id);
    auto got = r.unique_requirements;
    auto want = s.expected_detection;
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    EXPECT_EQ(got, want) << s.artifact_id;
  }
}

TEST(Detectors, SignatureAidNullIsOneRequirementTwoInstances) {
  for (const char* id : {"der-mut-mldsa44-cert-signature-aid-null", "der-mut-mldsa44-cert-signature-aid-octet-params"}) {
    const auto r = run(id);
    EXPECT_EQ(r.findings.size(), 2u) << id;
    EXPECT_EQ(r.unique_requirements, std::vector<std::string>{"MLDSA-CERT-SIGNATURE-AID-PARAMS-ABSENT"}) << id;
    EXPECT_EQ(r.redundant_count(), 1u);
    EXPECT_EQ(r.findings[0].locus, "tbs.signature.parameters");
    EXPECT_EQ(r.findings[1].locus, "signatureAlgorithm.parameters");
  }
}

TEST(Detectors, HashMlDsaSignatureIsOneFinding) {
  const auto r = run("der-mut-mldsa44-cert-signature-hashmldsa44");
  ASSERT_EQ(r.findings.size(), 1u);
  EXPECT_EQ(r.findings[0].requirement_id, "MLDSA-PKIX-HASHML-FORBIDDEN");
  EXPECT_EQ(r.findings[0].detector_kind, DetectorKind::policy);
}

TEST(Detectors, UnreducedCoefficientLocus) {
  const auto r = run("der-mut-mlkem768-spki-unreduced-byteencode12-pub");
  ASSERT_EQ(r.findings.size(), 1u);
  EXPECT_EQ(r.findings[0].locus, "spki.subjectPublicKey.t_hat[7]");
}

TEST(Detectors, WrongLengthKeyIsNotDecoded) {
  const auto r = run("der-mut-mlkem768-spki-payload-truncated-pub");
  EXPECT_EQ(r.unique_requirements, std::vector<std::string>{"MLKEM-SPKI-PUBLIC-KEY-LENGTH"});
}

TEST(Detectors, KeyUsageChainsReportBothBits) {
  const auto r = run("openssl-mut-mldsa65-keyusage-key-encipherment-cert");
  EXPECT_EQ(r.unique_requirements, (std::vector<std::string>{"MLDSA-CERT-KU-AT-LEAST-ONE-SIGNING-BIT",
                                                             "MLDSA-CERT-KU-NO-ENCIPHERMENT-OR-AGREEMENT"}));
}

TEST(Detectors, HashMismatchOnBothFormCarriesConsistency) {
  const auto r = run("der-mut-mlkem512-key-hash-mismatch");
  EXPECT_EQ(r.unique_requirements, (std::vector<std::string>{"MLKEM-PRIVATE-EXPANDED-HASH-CHECK",
                                                             "MLKEM-PRIVATE-BOTH-CONSISTENCY"}));
}

TEST(Detectors, BothMismatchUsesSubstrate) {
  const auto r = run("der-mut-mldsa44-key-both-mismatch");
  ASSERT_EQ(r.findings.size(), 1u);
  EXPECT_EQ(r.findings[0].locus, "privateKey.both");
  EXPECT_EQ(r.findings[0].detector_kind, DetectorKind::import_crypto);
}

TEST(Detectors, UnavailableSubstrateIsEvaluationError) {
  const auto& a = valid_by_id().at("openssl-mldsa44-ee-key");
  const auto r = eval::run_detectors(a.entry.artifact_type, a.der, builtin_registry(), substrate::Substrate::unavailable());
  EXPECT_TRUE(r.findings.empty());
  ASSERT_TRUE(r.evaluation_error);
  EXPECT_EQ(r.evaluation_error->rfind("bridge-unavailable", 0), 0u);
  EXPECT_EQ(eval::disposition_for(r, builtin_registry(), Mode::deployable), eval::Disposition::error);
}

TEST(Detectors, SubRegistryRestrictsEmission) {
  const auto spki_only = builtin_registry().subset(GatePack::ca_spki_public_key);
  const auto r = run("openssl-mut-mldsa65-keyusage-key-encipherment-cert", spki_only);
  EXPECT_TRUE(r.findings.empty());
  const auto cert_only = builtin_registry().subset(GatePack::ca_certificate_profile);
  EXPECT_TRUE(run("der-mut-mlkem768-cert-spki-aid-null", cert_only).findings.empty());
  EXPECT_EQ(run("der-mut-mlkem768-cert-spki-aid-null", spki_only).unique_requirements,
            std::vector<std::string>{"MLKEM-SPKI-AID-PARAMS-ABSENT"});
}

TEST(Detectors, CertificateFindingsPrecedeEmbeddedSpki) {
  auto s = spec("der-mut-mldsa44-cert-signature-aid-null");
  corpus::MutationStep extra;
  extra.op = "aid-parameters-null";
  s.steps.push_back(extra);
  const auto& parent = valid_by_id().at(s.parent_id);
  const Bytes der = corpus::apply_mutation(s, parent.der, parent.entry.artifact_type);
  const auto r = eval::run_detectors(ArtifactType::certificate, der, builtin_registry(), substrate::Substrate::structural());
  ASSERT_TRUE(r.first_hit);
  EXPECT_EQ(*r.first_hit, "MLDSA-CERT-SIGNATURE-AID-PARAMS-ABSENT");
  EXPECT_EQ(r.unique_requirements.back(), "MLDSA-SPKI-AID-PARAMS-ABSENT");
}

TEST(Dispositions, PrecedenceBlockOverWarn) {
  const auto reg = builtin_registry();
  detect::DetectionResult r;
  r.add({"MLKEM-SPKI-ENCODE-DECODE-IDENTITY", "x", "", DetectorKind::structural});
  EXPECT_EQ(eval::disposition_for(r, reg, Mode::deployable), eval::Disposition::warn);
  EXPECT_EQ(eval::disposition_for(r, reg, Mode::strict), eval::Disposition::block);
  r.add({"MLKEM-SPKI-PUBLIC-KEY-LENGTH", "y", "", DetectorKind::structural});
  EXPECT_EQ(eval::disposition_for(r, reg, Mode::deployable), eval::Disposition::block);
  EXPECT_EQ(eval::disposition_for(detect::DetectionResult{}, reg, Mode::strict), eval::Disposition::pass);
}

TEST(Detectors, FirstHitIsFirstExpectedRequirement) {
  for (const auto& s : corpus::invalid_roster()) {
    const auto r = run(s.artifact_id);
    ASSERT_TRUE(r.first_hit) << s.artifact_id;
    EXPECT_EQ(*r.first_hit, s.expected_detection.front()) << s.artifact_id;
  }
}
