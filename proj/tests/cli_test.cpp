#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>

#include "pqassure/substrate.hpp"
#include "support.hpp"

using namespace pqassure;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
};

Result cli(const fs::path& cwd, const std::string& args) {
  const fs::path log = cwd / "cli.log";
  const std::string cmd = "cd '" + cwd.string() + "' && '" + PQ_CLI + "' " + args + " > '" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, text};
}

std::string stub(const char* name) { return std::string(PQ_TESTS_DIR) + "/stubs/" + name; }

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new pqtest::TempDir("cli");
    ::unsetenv(substrate::kBridgeEnv);
    ASSERT_EQ(cli(dir_->path(), "gen-corpus").code, 0);
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }
  const fs::path& cwd() const { return dir_->path(); }
  static pqtest::TempDir* dir_;
};

pqtest::TempDir* CliTest::dir_ = nullptr;

}  // namespace

TEST_F(CliTest, UnknownSubcommandIsUsage) { EXPECT_EQ(cli(cwd(), "frobnicate").code, 64); }

TEST_F(CliTest, BadFlagIsUsage) { EXPECT_EQ(cli(cwd(), "evaluate --no-such-flag").code, 64); }

TEST_F(CliTest, BadModeIsUsage) { EXPECT_EQ(cli(cwd(), "evaluate --mode lenient").code, 64); }

TEST_F(CliTest, MissingSubcommandIsUsage) { EXPECT_EQ(cli(cwd(), "").code, 64); }

TEST_F(CliTest, ValidateRegistryBuiltin) {
  const auto r = cli(cwd(), "validate-registry");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("\"records\": 17"), std::string::npos);
}

TEST_F(CliTest, ExplicitRegistryMustExist) { EXPECT_EQ(cli(cwd(), "--registry nope.json validate-registry").code, 2); }

TEST_F(CliTest, ExportedRegistryValidates) {
  ASSERT_EQ(cli(cwd(), "export-registry exported.json").code, 0);
  EXPECT_EQ(cli(cwd(), "--registry exported.json validate-registry").code, 0);
}

TEST_F(CliTest, EvaluateStrict) {
  const auto r = cli(cwd(), "evaluate --mode strict");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("block 27, warn 0, pass 21"), std::string::npos) << r.out;
  EXPECT_TRUE(fs::exists(cwd() / "results" / "policy_summary_strict.json"));
}

TEST_F(CliTest, EvaluateDefaultsToDeployable) {
  const auto r = cli(cwd(), "evaluate");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("deployable: "), std::string::npos);
  EXPECT_NE(r.out.find("block 26, warn 1, pass 21"), std::string::npos) << r.out;
}

TEST_F(CliTest, EvaluateWithMissingBridgeFailsAsInfrastructure) {
  const auto r = cli(cwd(), "evaluate --bridge /nonexistent/bridge --out results-bridge");
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_NE(r.out.find("bridge-unavailable"), std::string::npos);
}

TEST_F(CliTest, EvaluateWithAlwaysConsistentBridgeMissesMismatch) {
  const auto r = cli(cwd(), "evaluate --bridge '" + stub("bridge_exit0.sh") + "' --out results-stub");
  EXPECT_EQ(r.code, 1) << r.out;
  EXPECT_NE(r.out.find("der-mut-mldsa44-key-both-mismatch: missing MLDSA-PRIVATE-BOTH-CONSISTENCY"), std::string::npos);
}

TEST_F(CliTest, CoverageSurface) {
  const auto r = cli(cwd(), "coverage --surface private-key --mode strict");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("7/7 requirements detected, 0 open gap(s)"), std::string::npos) << r.out;
  EXPECT_EQ(cli(cwd(), "coverage --surface runtime").code, 64);
}

TEST_F(CliTest, GatePackImporter) {
  const auto r = cli(cwd(), "gate-pack --pack import-private-key --mode strict");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("(owner artifact-importer): 7/7 requirements detected"), std::string::npos) << r.out;
  EXPECT_TRUE(fs::exists(cwd() / "results" / "gate_pack_import-private-key_strict.json"));
  EXPECT_EQ(cli(cwd(), "gate-pack --pack runtime-consumer").code, 64);
}

TEST_F(CliTest, Workflow) {
  EXPECT_EQ(cli(cwd(), "workflow --out views").code, 0);
  for (const char* f : {"policy_matrix.csv", "stage_owner_summary.json", "operator_gate_matrix.json",
                        "operator_gate_matrix.csv", "operator_readiness_summary.json", "reference_workflow.json",
                        "reference_workflow.md"}) {
    EXPECT_TRUE(fs::exists(cwd() / "views" / f)) << f;
  }
}

TEST_F(CliTest, BridgeCheckStructural) {
  const auto ps = pkix::ParameterSet::ml_dsa_44;
  const Bytes seed(32, 0x07);
  Bytes expanded = substrate::expand_seed(ps, seed);
  const std::string base = "bridge-check --param-set ML-DSA-44 --seed-hex " + to_hex(seed) + " --expanded-hex ";
  EXPECT_EQ(cli(cwd(), base + to_hex(expanded)).code, 0);
  expanded[9] ^= 0x40;
  EXPECT_EQ(cli(cwd(), base + to_hex(expanded)).code, 1);
  EXPECT_EQ(cli(cwd(), base + to_hex(expanded) + " --bridge '" + stub("bridge_exit2.sh") + "'").code, 2);
  EXPECT_EQ(cli(cwd(), base + "zz").code, 64);
  EXPECT_EQ(cli(cwd(), "bridge-check --param-set ML-KEM-2048 --seed-hex 00 --expanded-hex 00").code, 64);
}

TEST_F(CliTest, BridgeEnvironmentVariable) {
  const auto r = cli(cwd(), std::string("bridge-check --param-set ML-KEM-512 --seed-hex 00 --expanded-hex 00"));
  EXPECT_EQ(r.code, 2);
  ::setenv(substrate::kBridgeEnv, stub("bridge_exit1.sh").c_str(), 1);
  const auto via_env = cli(cwd(), "bridge-check --param-set ML-KEM-512 --seed-hex 00 --expanded-hex 00");
  const auto flag_wins =
      cli(cwd(), "bridge-check --param-set ML-KEM-512 --seed-hex 00 --expanded-hex 00 --bridge '" + stub("bridge_exit0.sh") + "'");
  ::unsetenv(substrate::kBridgeEnv);
  EXPECT_EQ(via_env.code, 1);
  EXPECT_EQ(flag_wins.code, 0);
}
