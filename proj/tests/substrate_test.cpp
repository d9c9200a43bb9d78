#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>

#include "pqassure/substrate.hpp"
#include "support.hpp"

using namespace pqassure;
using namespace pqassure::substrate;
using pkix::ParameterSet;

namespace {

std::string stub(const char* name) { return std::string(PQ_TESTS_DIR) + "/stubs/" + name; }

Bytes seed_for(ParameterSet ps) {
  return shake256(to_bytes("substrate-test"), pkix::entry_for(ps).expected_seed_len);
}

class EnvGuard {
 public:
  explicit EnvGuard(const char* value) {
    if (const char* old = std::getenv(kBridgeEnv)) saved_ = old;
    if (value) {
      ::setenv(kBridgeEnv, value, 1);
    } else {
      ::unsetenv(kBridgeEnv);
    }
  }
  ~EnvGuard() {
    if (saved_) {
      ::setenv(kBridgeEnv, saved_->c_str(), 1);
    } else {
      ::unsetenv(kBridgeEnv);
    }
  }

 private:
  std::optional<std::string> saved_;
};

}  // namespace

TEST(Expansion, LengthsPerParameterSet) {
  for (auto ps : pkix::kAllParameterSets) {
    EXPECT_EQ(expand_seed(ps, seed_for(ps)).size(), pkix::entry_for(ps).expected_expanded_len) << pkix::to_string(ps);
  }
}

TEST(Expansion, Deterministic) {
  const auto s = seed_for(ParameterSet::ml_dsa_65);
  EXPECT_EQ(expand_seed(ParameterSet::ml_dsa_65, s), expand_seed(ParameterSet::ml_dsa_65, s));
}

TEST(Expansion, MlKemLayoutHolds) {
  const auto s = seed_for(ParameterSet::ml_kem_768);
  const Bytes dk = expand_seed(ParameterSet::ml_kem_768, s);
  const auto layout = mlkem::Layout::for_rank(3);
  EXPECT_EQ(mlkem::check_expanded_hash(dk, layout), mlkem::HashRelation::consistent);
  const ByteView ek = ByteView(dk).subspan(layout.ek().offset, layout.ek().length);
  EXPECT_TRUE(mlkem::check_ek_canonical(ek, layout).canonical);
  EXPECT_TRUE(std::equal(s.end() - 32, s.end(), dk.begin() + static_cast<std::ptrdiff_t>(layout.z().offset)));
}

TEST(Expansion, BadSeedLength) {
  try {
    expand_seed(ParameterSet::ml_kem_512, Bytes(32, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), "bad-seed-length");
  }
}

TEST(Structural, ConsistentAndMismatch) {
  const auto ps = ParameterSet::ml_dsa_44;
  const auto s = seed_for(ps);
  Bytes x = expand_seed(ps, s);
  EXPECT_EQ(check_structural(ps, s, x).kind, Verdict::consistent);
  x[100] ^= 1;
  EXPECT_EQ(check_structural(ps, s, x).kind, Verdict::mismatch);
}

TEST(Bridge, ExitCodesMapToVerdicts) {
  const auto s = seed_for(ParameterSet::ml_kem_512);
  const Bytes junk(8, 0);
  EXPECT_EQ(invoke_bridge(stub("bridge_exit0.sh"), ParameterSet::ml_kem_512, s, junk).kind, Verdict::consistent);
  EXPECT_EQ(invoke_bridge(stub("bridge_exit1.sh"), ParameterSet::ml_kem_512, s, junk).kind, Verdict::mismatch);
  const auto v = invoke_bridge(stub("bridge_exit2.sh"), ParameterSet::ml_kem_512, s, junk);
  EXPECT_EQ(v.kind, Verdict::bridge_failure);
  EXPECT_EQ(v.detail, "exit 2: stub bridge refused ML-KEM-512");
}

TEST(Bridge, MissingExecutableIsFailure) {
  const auto v = invoke_bridge(stub("does_not_exist.sh"), ParameterSet::ml_dsa_44, Bytes(32, 0), Bytes(1, 0));
  EXPECT_EQ(v.kind, Verdict::bridge_failure);
  EXPECT_EQ(v.detail.rfind("spawn", 0), 0u);
}

TEST(Bridge, NonExecutableIsFailure) {
  const auto v = invoke_bridge(stub("bridge_not_executable.sh"), ParameterSet::ml_dsa_44, Bytes(32, 0), Bytes(1, 0));
  EXPECT_EQ(v.kind, Verdict::bridge_failure);
}

TEST(Bridge, SignalIsFailure) {
  const auto v = invoke_bridge(stub("bridge_killed.sh"), ParameterSet::ml_dsa_44, Bytes(32, 0), Bytes(1, 0));
  EXPECT_EQ(v.kind, Verdict::bridge_failure);
  EXPECT_EQ(v.detail.rfind("signal 9", 0), 0u);
}

TEST(Bridge, ReceivesTokenAndHexArguments) {
  pqtest::TempDir dir("bridge-args");
  const auto out = (dir.path() / "args.txt").string();
  ::setenv("PQ_BRIDGE_ARGS_OUT", out.c_str(), 1);
  const auto v = invoke_bridge(stub("bridge_record_args.sh"), ParameterSet::ml_kem_1024, pqtest::hex("00ff"),
                               pqtest::hex("abcd"));
  ::unsetenv("PQ_BRIDGE_ARGS_OUT");
  EXPECT_EQ(v.kind, Verdict::consistent);
  std::ifstream in(out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "ML-KEM-1024 00ff abcd");
}

TEST(Bridge, StructuralBridgeExecutable) {
  const auto ps = ParameterSet::ml_kem_768;
  const auto s = seed_for(ps);
  Bytes x = expand_seed(ps, s);
  EXPECT_EQ(invoke_bridge(PQ_STRUCTURAL_BRIDGE, ps, s, x).kind, Verdict::consistent);
  x[0] ^= 1;
  EXPECT_EQ(invoke_bridge(PQ_STRUCTURAL_BRIDGE, ps, s, x).kind, Verdict::mismatch);
  EXPECT_EQ(invoke_bridge(PQ_STRUCTURAL_BRIDGE, ps, Bytes(3, 0), x).kind, Verdict::bridge_failure);
}

TEST(Resolution, FlagBeatsEnvironment) {
  EnvGuard env("/env/bridge");
  EXPECT_EQ(resolve_substrate(std::string("/flag/bridge")).bridge_path(), "/flag/bridge");
  EXPECT_EQ(resolve_substrate(std::nullopt).bridge_path(), "/env/bridge");
}

TEST(Resolution, DefaultIsStructural) {
  EnvGuard env(nullptr);
  EXPECT_EQ(resolve_substrate(std::nullopt).kind(), Substrate::Kind::structural);
}

TEST(Resolution, UnavailableNeverConsistent) {
  const auto v = Substrate::unavailable().check_consistency(ParameterSet::ml_dsa_44, Bytes(32, 0), Bytes(2560, 0));
  EXPECT_EQ(v.kind, Verdict::bridge_failure);
}
