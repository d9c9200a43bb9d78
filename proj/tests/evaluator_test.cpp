#include <gtest/gtest.h>

#include "pqassure/evaluator.hpp"
#include "pqassure/pipeline.hpp"
#include "support.hpp"

using namespace pqassure;
using eval::Disposition;
namespace corpus = pqassure::corpus;
namespace fs = std::filesystem;

namespace {

const eval::RunSummary& run(Mode m) {
  static const auto strict = eval::evaluate_corpus(corpus::read_manifest(pqtest::shared_corpus() / "manifest.jsonl"),
                                                   pqtest::shared_corpus(), builtin_registry(), Mode::strict,
                                                   substrate::Substrate::structural());
  static const auto deployable = eval::evaluate_corpus(
      corpus::read_manifest(pqtest::shared_corpus() / "manifest.jsonl"), pqtest::shared_corpus(), builtin_registry(),
      Mode::deployable, substrate::Substrate::structural());
  return m == Mode::strict ? strict : deployable;
}

}  // namespace

TEST(Evaluate, StrictTotals) {
  const auto& s = run(Mode::strict);
  EXPECT_EQ(s.totals.block, 27u);
  EXPECT_EQ(s.totals.warn, 0u);
  EXPECT_EQ(s.totals.pass, 21u);
  EXPECT_EQ(s.false_positives, 0u);
  EXPECT_TRUE(s.all_expected_met());
  EXPECT_TRUE(s.no_unexpected());
  EXPECT_TRUE(s.criteria_hold());
  EXPECT_EQ(pipeline::exit_code_for(s), 0);
}

TEST(Evaluate, DeployableTotals) {
  const auto& s = run(Mode::deployable);
  EXPECT_EQ(s.totals.block, 26u);
  EXPECT_EQ(s.totals.warn, 1u);
  EXPECT_EQ(s.totals.pass, 21u);
  const auto* warned = s.find("der-mut-mlkem768-spki-unreduced-byteencode12-pub");
  ASSERT_NE(warned, nullptr);
  EXPECT_EQ(warned->disposition, Disposition::warn);
}

TEST(Evaluate, FindingsIdenticalAcrossModes) {
  const auto& a = run(Mode::strict);
  const auto& b = run(Mode::deployable);
  ASSERT_EQ(a.reports.size(), b.reports.size());
  for (std::size_t i = 0; i < a.reports.size(); ++i) {
    auto ja = eval::to_json(a.reports[i]);
    auto jb = eval::to_json(b.reports[i]);
    EXPECT_EQ(ja["findings"].dump(), jb["findings"].dump()) << a.reports[i].artifact_id;
  }
}

TEST(Evaluate, PerStageTotals) {
  const auto& s = run(Mode::strict);
  EXPECT_EQ(s.per_stage.at(Stage::certificate_profile).artifacts, 14u);
  EXPECT_EQ(s.per_stage.at(Stage::spki_public_key).artifacts, 20u);
  EXPECT_EQ(s.per_stage.at(Stage::private_key_import).artifacts, 14u);
  EXPECT_EQ(s.per_stage.at(Stage::spki_public_key).block, 13u);
}

TEST(Evaluate, RedundancyAccounting) {
  const auto* r = run(Mode::strict).find("der-mut-mldsa44-cert-signature-aid-null");
  ASSERT_NE(r, nullptr);
  EXPECT_EQ(r->detection.findings.size(), 2u);
  EXPECT_EQ(r->detection.unique_requirements.size(), 1u);
  EXPECT_EQ(run(Mode::strict).per_requirement.at("MLDSA-CERT-SIGNATURE-AID-PARAMS-ABSENT").instances, 4u);
}

TEST(Coverage, ImporterClosureBothModes) {
  for (auto m : kModes) {
    const auto c = eval::coverage_report(run(m), builtin_registry(), eval::Surface::private_key);
    EXPECT_EQ(c.rows.size(), 7u);
    EXPECT_EQ(c.detected_requirements(), 7u);
    EXPECT_TRUE(c.open_gaps().empty());
    EXPECT_EQ(c.invalid_artifacts, 7u);
    EXPECT_EQ(c.invalid_met, 7u);
  }
}

TEST(Coverage, CertificateSpkiSurface) {
  const auto c = eval::coverage_report(run(Mode::deployable), builtin_registry(), eval::Surface::certificate_spki);
  EXPECT_EQ(c.rows.size(), 10u);
  EXPECT_EQ(c.detected_requirements(), 10u);
  EXPECT_EQ(c.invalid_artifacts, 20u);
  EXPECT_EQ(c.valid_passed, 14u);
}

TEST(Evaluate, UnreadableArtifactIsInfrastructureFailure) {
  auto entries = corpus::read_manifest(pqtest::shared_corpus() / "manifest.jsonl");
  entries[0].path = "valid/openssl/absent.pem";
  const auto s = eval::evaluate_corpus(entries, pqtest::shared_corpus(), builtin_registry(), Mode::strict,
                                       substrate::Substrate::structural());
  EXPECT_EQ(s.totals.error, 1u);
  EXPECT_EQ(s.reports[0].error_kind, "artifact-unreadable");
  EXPECT_EQ(pipeline::exit_code_for(s), 2);
}

TEST(Evaluate, ParseFailureFailsAssurance) {
  pqtest::TempDir dir("parse-failure");
  corpus::write_file(dir.path() / "broken.pem", pem::encode(pem::kPublicKey, pqtest::hex("3005020105")));
  corpus::ManifestEntry e;
  e.artifact_id = "broken";
  e.path = "broken.pem";
  e.artifact_type = ArtifactType::spki;
  e.stage = Stage::spki_public_key;
  e.valid = true;
  const auto s = eval::evaluate_corpus({e}, dir.path(), builtin_registry(), Mode::strict, substrate::Substrate::structural());
  EXPECT_EQ(s.reports[0].disposition, Disposition::error);
  EXPECT_EQ(s.reports[0].error_kind, "parse-failure");
  EXPECT_EQ(pipeline::exit_code_for(s), 1);
}

TEST(Evaluate, BridgeUnavailableFailsTheRun) {
  const auto s = eval::evaluate_corpus(corpus::read_manifest(pqtest::shared_corpus() / "manifest.jsonl"),
                                       pqtest::shared_corpus(), builtin_registry(), Mode::deployable,
                                       substrate::Substrate::unavailable());
  const auto* r = s.find("openssl-mldsa44-ee-key");
  ASSERT_NE(r, nullptr);
  EXPECT_EQ(r->disposition, Disposition::error);
  EXPECT_FALSE(s.criteria_hold());
  EXPECT_EQ(pipeline::exit_code_for(s), 2);
}

TEST(Reports, EmissionIsDeterministic) {
  pqtest::TempDir a("reports-a"), b("reports-b");
  const auto pa = eval::emit_reports(run(Mode::strict), builtin_registry(), a.path());
  eval::emit_reports(run(Mode::strict), builtin_registry(), b.path());
  ASSERT_EQ(pa.size(), 4u);
  for (const auto& p : pa) {
    EXPECT_EQ(corpus::read_file(p), corpus::read_file(b.path() / p.filename())) << p.filename();
  }
}

TEST(Reports, PolicySummaryCounts) {
  const auto dep = eval::policy_summary(run(Mode::deployable), builtin_registry());
  EXPECT_EQ(dep["block_count"], 16);
  EXPECT_EQ(dep["warn_count"], 1);
  const auto strict = eval::policy_summary(run(Mode::strict), builtin_registry());
  EXPECT_EQ(strict["block_count"], 17);
  EXPECT_EQ(strict["warn_count"], 0);
}

TEST(Coverage, InactiveRowIsOpenGap) {
  auto reg = builtin_registry();
  auto extra = *reg.find("MLKEM-SPKI-PUBLIC-KEY-LENGTH");
  extra.id = "MLKEM-SPKI-SYNTHETIC-INACTIVE";
  reg.records.push_back(extra);
  reg.sort();
  const auto s = eval::evaluate_corpus(corpus::read_manifest(pqtest::shared_corpus() / "manifest.jsonl"),
                                       pqtest::shared_corpus(), reg, Mode::strict, substrate::Substrate::structural());
  const auto c = eval::coverage_report(s, reg, eval::Surface::certificate_spki);
  EXPECT_EQ(c.open_gaps(), std::vector<std::string>{"MLKEM-SPKI-SYNTHETIC-INACTIVE"});
}
