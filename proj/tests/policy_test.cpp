#include <gtest/gtest.h>

#include <sstream>

#include "pqassure/policy.hpp"
#include "support.hpp"

using namespace pqassure;

TEST(PolicyViews, StageOwnerSummary) {
  const auto j = policy::stage_owner_summary(builtin_registry());
  EXPECT_EQ(j["stages"]["certificate/profile"], 5);
  EXPECT_EQ(j["stages"]["SPKI/public-key"], 5);
  EXPECT_EQ(j["stages"]["private-key-container/import"], 7);
  EXPECT_EQ(j["stages"]["runtime-consumer"], 0);
  EXPECT_EQ(j["owners"]["ca-preissuance"], 10);
  EXPECT_EQ(j["owners"]["artifact-importer"], 7);
}

TEST(PolicyViews, OperatorGateMatrixStrictAllBlock) {
  const auto j = policy::operator_gate_matrix(builtin_registry());
  int strict_block = 0, dep_block = 0, dep_warn = 0;
  for (const auto& row : j["rows"]) {
    if (row["mode"] == "strict") strict_block += row["action"] == "block";
    if (row["mode"] == "deployable") (row["action"] == "block" ? dep_block : dep_warn)++;
  }
  EXPECT_EQ(strict_block, 17);
  EXPECT_EQ(dep_block, 16);
  EXPECT_EQ(dep_warn, 1);
}

TEST(PolicyViews, PolicyMatrixColumnsAndRows) {
  const auto csv = policy::policy_matrix_csv(builtin_registry());
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "id,owner,stage,gate_pack,detector_kind,normative_strength,strict,deployable");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 17);
  EXPECT_NE(csv.find("MLKEM-SPKI-ENCODE-DECODE-IDENTITY,ca-preissuance,SPKI/public-key,ca-spki-public-key,structural,"),
            std::string::npos);
}

TEST(PolicyViews, ReadinessSummary) {
  const auto j = policy::operator_readiness_summary(builtin_registry());
  EXPECT_TRUE(j["registry_clean"].get<bool>());
  ASSERT_EQ(j["gate_packs"].size(), 3u);
  EXPECT_EQ(j["gate_packs"][1]["modes"]["deployable"]["warn"], 1);
  EXPECT_EQ(j["gate_packs"][2]["owner"], "artifact-importer");
}

TEST(PolicyViews, ReferenceWorkflowEndsAtRuntimeBoundary) {
  const auto j = policy::reference_workflow(builtin_registry());
  ASSERT_EQ(j["steps"].size(), 4u);
  EXPECT_EQ(j["steps"][3]["owner"], "runtime-consumer");
  EXPECT_TRUE(j["steps"][3]["requirements"].empty());
  EXPECT_NE(policy::reference_workflow_md(builtin_registry()).find("| 2 | ca-preissuance | SPKI/public-key |"),
            std::string::npos);
}

TEST(PolicyViews, EmissionIsDeterministic) {
  pqtest::TempDir a("views-a"), b("views-b");
  const auto files = policy::emit_workflow(builtin_registry(), a.path());
  policy::emit_workflow(builtin_registry(), b.path());
  EXPECT_EQ(files.size(), 7u);
  for (const auto& p : files) EXPECT_EQ(corpus::read_file(p), corpus::read_file(b.path() / p.filename()));
}

TEST(PolicyViews, CsvQuoting) {
  EXPECT_EQ(policy::csv_row({"a", "b,c", "d\"e"}), "a,\"b,c\",\"d\"\"e\"\n");
}
