#include <gtest/gtest.h>

#include <fstream>

#include "pqassure/registry.hpp"
#include "support.hpp"

using namespace pqassure;

namespace {

std::size_t count_if_records(const Registry& reg, auto pred) {
  return static_cast<std::size_t>(std::count_if(reg.records.begin(), reg.records.end(), pred));
}

}  // namespace

TEST(BuiltinRegistry, ValidatesClean) {
  const auto rep = validate_registry(builtin_registry());
  for (const auto& v : rep.violations) ADD_FAILURE() << v.kind << " " << v.record_id << " " << v.message;
  EXPECT_EQ(rep.record_count, 17u);
}

TEST(BuiltinRegistry, Topology) {
  const auto reg = builtin_registry();
  EXPECT_EQ(count_if_records(reg, [](auto& r) { return r.owner == Owner::ca_preissuance; }), 10u);
  EXPECT_EQ(count_if_records(reg, [](auto& r) { return r.owner == Owner::artifact_importer; }), 7u);
  EXPECT_EQ(count_if_records(reg, [](auto& r) { return r.owner == Owner::runtime_consumer; }), 0u);
  EXPECT_EQ(reg.subset(GatePack::ca_certificate_profile).records.size(), 5u);
  EXPECT_EQ(reg.subset(GatePack::ca_spki_public_key).records.size(), 5u);
  EXPECT_EQ(reg.subset(GatePack::import_private_key).records.size(), 7u);
  EXPECT_EQ(count_if_records(reg, [](auto& r) { return r.detector_kind == DetectorKind::structural; }), 10u);
  EXPECT_EQ(count_if_records(reg, [](auto& r) { return r.detector_kind == DetectorKind::policy; }), 4u);
  EXPECT_EQ(count_if_records(reg, [](auto& r) { return r.detector_kind == DetectorKind::import_crypto; }), 3u);
  EXPECT_EQ(count_if_records(reg, [](auto& r) { return r.normative_strength == Strength::must; }), 15u);
  EXPECT_EQ(count_if_records(reg, [](auto& r) { return r.normative_strength == Strength::should; }), 2u);
}

TEST(BuiltinRegistry, ModeActions) {
  const auto reg = builtin_registry();
  std::vector<std::string> warns;
  for (const auto& r : reg.records) {
    EXPECT_EQ(r.action(Mode::strict), Action::block) << r.id;
    if (r.action(Mode::deployable) == Action::warn) warns.push_back(r.id);
  }
  EXPECT_EQ(warns, std::vector<std::string>{"MLKEM-SPKI-ENCODE-DECODE-IDENTITY"});
}

TEST(BuiltinRegistry, EveryPackSharesOneOwnerAndStage) {
  const auto reg = builtin_registry();
  for (auto p : kGatePacks) {
    const auto place = placement_of(p);
    for (const auto& r : reg.subset(p).records) {
      EXPECT_EQ(r.owner, place.owner) << r.id;
      EXPECT_EQ(r.stage, place.stage) << r.id;
    }
  }
}

TEST(BuiltinRegistry, SortedAndFindable) {
  const auto reg = builtin_registry();
  EXPECT_TRUE(std::is_sorted(reg.records.begin(), reg.records.end(),
                             [](const auto& a, const auto& b) { return a.id < b.id; }));
  EXPECT_TRUE(reg.contains("MLDSA-PKIX-HASHML-FORBIDDEN"));
  EXPECT_FALSE(reg.contains("MLDSA-NOT-A-REQUIREMENT"));
}

TEST(RegistryJson, RoundTripIsLossless) {
  const auto reg = builtin_registry();
  const auto text = dump_registry(reg);
  const auto back = registry_from_json(nlohmann::json::parse(text));
  EXPECT_EQ(dump_registry(back), text);
  EXPECT_TRUE(validate_registry(back).clean());
}

TEST(RegistryJson, ShippedFileMatchesBuiltin) {
  const auto shipped = load_registry(std::string(PQ_SOURCE_DIR) + "/requirements.json");
  EXPECT_EQ(dump_registry(shipped), dump_registry(builtin_registry()));
}

TEST(RegistryJson, MissingFieldIsSchemaMismatch) {
  auto j = to_json(builtin_registry());
  j["records"][0].erase("gate_pack");
  try {
    registry_from_json(j);
    FAIL();
  } catch (const RegistryError& e) {
    EXPECT_EQ(e.kind(), "schema-mismatch");
  }
}

TEST(RegistryJson, UnknownEnumTokenIsSchemaMismatch) {
  auto j = to_json(builtin_registry());
  j["records"][0]["owner"] = "browser";
  EXPECT_THROW(registry_from_json(j), RegistryError);
}

TEST(RegistryJson, MissingFileIsIoFailure) {
  try {
    load_registry("/nonexistent/requirements.json");
    FAIL();
  } catch (const RegistryError& e) {
    EXPECT_EQ(e.kind(), "io-failure");
  }
}

TEST(RegistryValidation, WrongOwnerForPackIsTopologyViolation) {
  auto reg = builtin_registry();
  auto& r = reg.records[static_cast<std::size_t>(
      std::find_if(reg.records.begin(), reg.records.end(), [](auto& x) { return x.gate_pack == GatePack::import_private_key; }) -
      reg.records.begin())];
  r.owner = Owner::ca_preissuance;
  const auto rep = validate_registry(reg);
  EXPECT_GE(rep.count("topology-violation"), 1u);
}

TEST(RegistryValidation, SixteenRecordsIsCountViolation) {
  auto reg = builtin_registry();
  reg.records.pop_back();
  EXPECT_GE(validate_registry(reg).count("count-violation"), 1u);
}

TEST(RegistryValidation, MissingModeAction) {
  auto reg = builtin_registry();
  reg.records[0].mode_action.erase(Mode::deployable);
  EXPECT_EQ(validate_registry(reg).count("missing-mode-action"), 1u);
}

TEST(RegistryValidation, EmptyJustification) {
  auto reg = builtin_registry();
  reg.records[3].justification = "  ";
  EXPECT_EQ(validate_registry(reg).count("empty-justification"), 1u);
}

TEST(RegistryValidation, WarnUpgradedToBlockIsNonMonotone) {
  auto reg = builtin_registry();
  reg.records[0].mode_action[Mode::strict] = Action::warn;
  reg.records[0].mode_action[Mode::deployable] = Action::block;
  EXPECT_EQ(validate_registry(reg).count("mode-monotonicity-violation"), 1u);
}

TEST(RegistryValidation, PlannedConstructibilityRejected) {
  auto reg = builtin_registry();
  reg.records[0].constructibility = "planned";
  EXPECT_EQ(validate_registry(reg).count("constructibility-violation"), 1u);
}

TEST(RegistryValidation, DuplicateIdRejected) {
  auto reg = builtin_registry();
  reg.records[1].id = reg.records[0].id;
  EXPECT_GE(validate_registry(reg).count("schema-mismatch"), 1u);
}

TEST(RegistryValidation, ExtraDeployableWarnIsPolicyViolation) {
  auto reg = builtin_registry();
  reg.records[0].mode_action[Mode::deployable] = Action::warn;
  EXPECT_GE(validate_registry(reg).count("policy-violation"), 1u);
}

TEST(Enums, TokensRoundTrip) {
  for (const auto& [v, n] : EnumNames<FaultFamily>::table) EXPECT_EQ(parse_enum<FaultFamily>(n), v);
  EXPECT_EQ(name_of(Stage::spki_public_key), "SPKI/public-key");
  EXPECT_FALSE(parse_enum<Mode>("lenient"));
}
