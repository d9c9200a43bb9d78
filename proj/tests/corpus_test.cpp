#include <gtest/gtest.h>

#include <fstream>
#include <map>

#include "pqassure/corpus.hpp"
#include "support.hpp"

using namespace pqassure;
namespace corpus = pqassure::corpus;
namespace fs = std::filesystem;

namespace {

std::vector<corpus::ManifestEntry> manifest() { return corpus::read_manifest(pqtest::shared_corpus() / "manifest.jsonl"); }

std::map<std::string, std::string> tree_digest(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = to_hex(sha256(corpus::read_file(e.path())));
  }
  return out;
}

}  // namespace

TEST(Corpus, FortyEightArtifacts) {
  const auto m = manifest();
  EXPECT_EQ(m.size(), 48u);
  EXPECT_EQ(std::count_if(m.begin(), m.end(), [](auto& e) { return e.valid; }), 21);
}

TEST(Corpus, StageTotalsAndInvalidSplit) {
  std::map<Stage, int> total, invalid;
  for (const auto& e : manifest()) {
    ++total[e.stage];
    if (!e.valid) ++invalid[e.stage];
  }
  EXPECT_EQ(total[Stage::certificate_profile], 14);
  EXPECT_EQ(total[Stage::spki_public_key], 20);
  EXPECT_EQ(total[Stage::private_key_import], 14);
  EXPECT_EQ(invalid[Stage::certificate_profile], 7);
  EXPECT_EQ(invalid[Stage::spki_public_key], 13);
  EXPECT_EQ(invalid[Stage::private_key_import], 7);
}

TEST(Corpus, FaultFamilyCounts) {
  std::map<FaultFamily, int> fam;
  for (const auto& e : manifest()) {
    if (e.fault_family) ++fam[*e.fault_family];
  }
  EXPECT_EQ(fam[FaultFamily::encoding_container], 8);
  EXPECT_EQ(fam[FaultFamily::size_shape], 7);
  EXPECT_EQ(fam[FaultFamily::inter_field_consistency], 5);
  EXPECT_EQ(fam[FaultFamily::profile_usage_policy], 4);
  EXPECT_EQ(fam[FaultFamily::field_domain], 1);
  EXPECT_EQ(fam[FaultFamily::algorithm_policy], 1);
  EXPECT_EQ(fam[FaultFamily::import_validation], 1);
}

TEST(Corpus, ValidParameterSetSpreadPerStage) {
  std::map<Stage, std::multiset<std::string>> spread;
  for (const auto& e : manifest()) {
    if (e.valid) spread[e.stage].insert(e.parameter_set);
  }
  const std::multiset<std::string> want = {"ML-DSA-44",  "ML-DSA-65",  "ML-DSA-65",  "ML-DSA-87",
                                           "ML-KEM-512", "ML-KEM-768", "ML-KEM-1024"};
  for (auto st : {Stage::certificate_profile, Stage::spki_public_key, Stage::private_key_import}) {
    EXPECT_EQ(spread[st], want) << name_of(st);
  }
}

TEST(Corpus, ManifestVerifiesClean) {
  const auto rep = corpus::verify_manifest(pqtest::shared_corpus() / "manifest.jsonl");
  EXPECT_TRUE(rep.clean());
  EXPECT_EQ(rep.entries, 48u);
}

TEST(Corpus, ValidEntriesOmitInvalidOnlyKeys) {
  for (const auto& e : manifest()) {
    const auto j = corpus::to_json(e);
    EXPECT_EQ(j.contains("fault_family"), !e.valid) << e.artifact_id;
    EXPECT_EQ(j.contains("expected_detection"), !e.valid) << e.artifact_id;
  }
}

TEST(Corpus, InvalidAlgorithmIsClaimedOne) {
  for (const auto& e : manifest()) {
    if (e.artifact_id == "der-mut-mldsa65-spki-oid-swapped-to-mlkem768-pub") {
      EXPECT_EQ(e.algorithm, Algorithm::ml_kem);
      EXPECT_EQ(e.parameter_set, "ML-KEM-768");
    }
  }
}

TEST(Corpus, RegenerationIsByteIdentical) {
  pqtest::TempDir a("regen-a"), b("regen-b");
  corpus::generate_corpus(a.path());
  corpus::generate_corpus(b.path());
  EXPECT_EQ(tree_digest(a.path()), tree_digest(b.path()));
  EXPECT_EQ(tree_digest(a.path()), tree_digest(pqtest::shared_corpus()));
}

TEST(CorpusVerification, TamperedFileIsHashMismatch) {
  pqtest::TempDir dir("tamper");
  corpus::generate_corpus(dir.path());
  const auto m = corpus::read_manifest(dir.path() / "manifest.jsonl");
  {
    std::ofstream out(dir.path() / m[0].path, std::ios::app);
    out << "\n";
  }
  fs::remove(dir.path() / m[1].path);
  const auto rep = corpus::verify_manifest(dir.path() / "manifest.jsonl");
  EXPECT_EQ(rep.count("hash-mismatch"), 1u);
  EXPECT_EQ(rep.count("missing-file"), 1u);
}

TEST(CorpusVerification, MalformedManifestLine) {
  pqtest::TempDir dir("bad-manifest");
  corpus::write_file(dir.path() / "manifest.jsonl", "{\"artifact_id\": 3}\n");
  EXPECT_THROW(corpus::read_manifest(dir.path() / "manifest.jsonl"), corpus::ManifestError);
}

TEST(Mutation, InapplicableOperatorRejected) {
  const auto forged = corpus::forge_valid();
  const auto& spki = *std::find_if(forged.begin(), forged.end(),
                                   [](auto& a) { return a.entry.artifact_id == "openssl-mlkem768-ee-pub"; });
  corpus::MutationStep step;
  step.op = "keyusage-empty";
  try {
    corpus::apply_step(step, spki.der, ArtifactType::spki, "x");
    FAIL();
  } catch (const corpus::MutationError& e) {
    EXPECT_TRUE(e.kind() == "operator-inapplicable" || e.kind() == "target-field-not-found") << e.kind();
  }
  step.op = "no-such-operator";
  EXPECT_THROW(corpus::apply_step(step, spki.der, ArtifactType::spki, "x"), corpus::MutationError);
}

TEST(Mutation, MissingParentRejected) {
  pqtest::TempDir dir("no-parent");
  try {
    corpus::generate_invalid_corpus({}, dir.path());
    FAIL();
  } catch (const corpus::MutationError& e) {
    EXPECT_EQ(e.kind(), "missing-valid-parent");
  }
}

TEST(Mutation, UnreducedLaneIs4095) {
  const auto forged = corpus::forge_valid();
  const auto& spki = *std::find_if(forged.begin(), forged.end(),
                                   [](auto& a) { return a.entry.artifact_id == "openssl-mlkem768-ee-pub"; });
  corpus::MutationStep step;
  step.op = "mlkem-unreduced-byteencode12-value";
  step.offset = 7;
  const auto view = pkix::parse_spki(corpus::apply_step(step, spki.der, ArtifactType::spki, "x"));
  EXPECT_EQ(mlkem::byte_decode12(ByteView(view.public_key).first(mlkem::kBlockBytes))[7], 4095);
}
