#pragma once

// Runs detectors over manifest entries under a policy mode, derives
// dispositions and expected-versus-actual accounting, and emits the
// per-mode report family.

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "pqassure/corpus.hpp"
#include "pqassure/detectors.hpp"
#include "pqassure/pkix.hpp"
#include "pqassure/registry.hpp"
#include "pqassure/substrate.hpp"

namespace pqassure::eval {

namespace fs = std::filesystem;

enum class Disposition { pass, warn, block, error };

inline std::string_view to_string(Disposition d) {
  switch (d) {
    case Disposition::pass: return "pass";
    case Disposition::warn: return "warn";
    case Disposition::block: return "block";
    case Disposition::error: return "error";
  }
  return "?";
}

// block > warn > pass; the registry's mode action is the whole policy.
inline Disposition disposition_for(const detect::DetectionResult& det, const Registry& reg, Mode mode) {
  if (det.evaluation_error) return Disposition::error;
  Disposition d = Disposition::pass;
  for (const auto& f : det.findings) {
    const auto* rec = reg.find(f.requirement_id);
    const auto action = rec ? rec->action(mode) : std::nullopt;
    if (action == Action::block || !action) return Disposition::block;
    d = Disposition::warn;
  }
  return d;
}

struct ArtifactReport {
  std::string artifact_id;
  ArtifactType artifact_type = ArtifactType::certificate;
  Stage stage = Stage::certificate_profile;
  bool valid = true;
  std::vector<std::string> expected_detection;
  Mode mode = Mode::strict;
  Disposition disposition = Disposition::pass;
  detect::DetectionResult detection;
  bool expected_met = true;
  std::vector<std::string> missing_expected;
  std::vector<std::string> unexpected;
  std::optional<std::string> error;
  std::string error_kind;  // artifact-unreadable | parse-failure | bridge-unavailable

  bool infrastructure_error() const {
    return error && (error_kind == "artifact-unreadable" || error_kind == "bridge-unavailable");
  }
};

inline detect::DetectionResult run_detectors(ArtifactType type, ByteView bytes, const Registry& reg,
                                             const substrate::Substrate& sub) {
  switch (type) {
    case ArtifactType::certificate: return detect::detect_certificate(pkix::parse_certificate(bytes), reg);
    case ArtifactType::spki: return detect::detect_spki(pkix::parse_spki(bytes), reg);
    case ArtifactType::private_key_container:
      return detect::detect_private_key(pkix::parse_private_key_container(bytes), sub, reg);
  }
  return {};
}

inline ArtifactReport evaluate_entry(const corpus::ManifestEntry& entry, const fs::path& base_dir,
                                     const Registry& reg, Mode mode, const substrate::Substrate& sub) {
  ArtifactReport r;
  r.artifact_id = entry.artifact_id;
  r.artifact_type = entry.artifact_type;
  r.stage = entry.stage;
  r.valid = entry.valid;
  r.mode = mode;
  for (const auto& id : entry.expected_detection) {
    if (reg.contains(id)) r.expected_detection.push_back(id);
  }
  r.detection.artifact_id = entry.artifact_id;

  Bytes bytes;
  try {
    bytes = corpus::read_file(base_dir / entry.path);
  } catch (const std::exception& e) {
    r.error = e.what();
    r.error_kind = "artifact-unreadable";
  }
  if (!r.error) {
    try {
      r.detection = run_detectors(entry.artifact_type, bytes, reg, sub);
      r.detection.artifact_id = entry.artifact_id;
      if (r.detection.evaluation_error) {
        r.error = r.detection.evaluation_error;
        r.error_kind = "bridge-unavailable";
      }
    } catch (const std::exception& e) {
      r.error = e.what();
      r.error_kind = "parse-failure";
    }
  }

  r.disposition = r.error ? Disposition::error : disposition_for(r.detection, reg, mode);
  const auto& found = r.detection.unique_requirements;
  for (const auto& id : r.expected_detection) {
    if (std::find(found.begin(), found.end(), id) == found.end()) r.missing_expected.push_back(id);
  }
  for (const auto& id : found) {
    if (std::find(r.expected_detection.begin(), r.expected_detection.end(), id) == r.expected_detection.end()) {
      r.unexpected.push_back(id);
    }
  }
  r.expected_met = !r.error && r.missing_expected.empty();
  return r;
}

struct Totals {
  std::size_t artifacts = 0, valid = 0, invalid = 0, pass = 0, warn = 0, block = 0, error = 0;

  void count(const ArtifactReport& r) {
    ++artifacts;
    ++(r.valid ? valid : invalid);
    switch (r.disposition) {
      case Disposition::pass: ++pass; break;
      case Disposition::warn: ++warn; break;
      case Disposition::block: ++block; break;
      case Disposition::error: ++error; break;
    }
  }
};

struct RequirementTally {
  std::size_t exercised = 0;  // invalid artifacts expecting the requirement
  std::size_t detected = 0;   // of those, artifacts where it fired
  std::size_t instances = 0;  // finding instances across every artifact
};

struct RunSummary {
  Mode mode = Mode::strict;
  std::string profile;
  std::string registry_version;
  std::string substrate;
  Totals totals;
  std::size_t false_positives = 0;
  std::map<Stage, Totals> per_stage;
  std::map<std::string, RequirementTally> per_requirement;
  std::vector<ArtifactReport> reports;  // sorted by artifact id

  bool all_expected_met() const {
    return std::all_of(reports.begin(), reports.end(), [](const ArtifactReport& r) { return r.expected_met; });
  }
  bool no_unexpected() const {
    return std::all_of(reports.begin(), reports.end(), [](const ArtifactReport& r) { return r.unexpected.empty(); });
  }
  bool no_errors() const { return totals.error == 0; }
  bool invalid_all_flagged() const {
    return std::all_of(reports.begin(), reports.end(), [](const ArtifactReport& r) {
      return r.valid || r.disposition == Disposition::block || r.disposition == Disposition::warn;
    });
  }
  bool criteria_hold() const {
    return all_expected_met() && false_positives == 0 && no_unexpected() && no_errors() && invalid_all_flagged();
  }
  bool infrastructure_failure() const {
    return std::any_of(reports.begin(), reports.end(), [](const ArtifactReport& r) { return r.infrastructure_error(); });
  }
  const ArtifactReport* find(std::string_view id) const {
    for (const auto& r : reports) {
      if (r.artifact_id == id) return &r;
    }
    return nullptr;
  }
};

inline RunSummary evaluate_corpus(const std::vector<corpus::ManifestEntry>& entries, const fs::path& base_dir,
                                  const Registry& reg, Mode mode, const substrate::Substrate& sub) {
  RunSummary s;
  s.mode = mode;
  s.profile = reg.profile;
  s.registry_version = reg.version;
  s.substrate = sub.describe();
  for (const auto& rec : reg.records) s.per_requirement[rec.id];

  std::vector<const corpus::ManifestEntry*> ordered;
  for (const auto& e : entries) ordered.push_back(&e);
  std::sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) { return a->artifact_id < b->artifact_id; });

  for (const auto* e : ordered) {
    ArtifactReport r = evaluate_entry(*e, base_dir, reg, mode, sub);
    s.totals.count(r);
    s.per_stage[r.stage].count(r);
    if (r.valid && r.disposition != Disposition::pass) ++s.false_positives;
    for (const auto& id : r.expected_detection) {
      auto& t = s.per_requirement[id];
      ++t.exercised;
      const auto& u = r.detection.unique_requirements;
      if (std::find(u.begin(), u.end(), id) != u.end()) ++t.detected;
    }
    for (const auto& f : r.detection.findings) ++s.per_requirement[f.requirement_id].instances;
    s.reports.push_back(std::move(r));
  }
  for (auto st : {Stage::certificate_profile, Stage::spki_public_key, Stage::private_key_import}) s.per_stage[st];
  return s;
}

// ---------------------------------------------------------------------------
// JSON views

inline nlohmann::json to_json(const Totals& t) {
  return {{"artifacts", t.artifacts}, {"valid", t.valid}, {"invalid", t.invalid}, {"pass", t.pass},
          {"warn", t.warn},           {"block", t.block}, {"error", t.error}};
}

inline nlohmann::json to_json(const detect::Finding& f) {
  return {{"requirement_id", f.requirement_id},
          {"locus", f.locus},
          {"detail", f.detail},
          {"detector_kind", name_of(f.detector_kind)}};
}

inline nlohmann::json to_json(const ArtifactReport& r) {
  nlohmann::json findings = nlohmann::json::array();
  for (const auto& f : r.detection.findings) findings.push_back(to_json(f));
  nlohmann::json j = {
      {"artifact_id", r.artifact_id},
      {"artifact_type", name_of(r.artifact_type)},
      {"stage", name_of(r.stage)},
      {"validity", r.valid ? "valid" : "invalid"},
      {"mode", name_of(r.mode)},
      {"disposition", to_string(r.disposition)},
      {"findings", findings},
      {"unique_requirements", r.detection.unique_requirements},
      {"first_hit", r.detection.first_hit ? nlohmann::json(*r.detection.first_hit) : nlohmann::json()},
      {"redundant_count", r.detection.redundant_count()},
      {"expected_detection", r.expected_detection},
      {"expected_met", r.expected_met},
      {"missing_expected", r.missing_expected},
      {"unexpected", r.unexpected},
  };
  if (r.error) j["error"] = {{"kind", r.error_kind}, {"detail", *r.error}};
  return j;
}

inline nlohmann::json criteria_json(const RunSummary& s) {
  return {{"all_expected_met", s.all_expected_met()},
          {"zero_false_positives", s.false_positives == 0},
          {"no_unexpected", s.no_unexpected()},
          {"no_errors", s.no_errors()},
          {"invalid_all_flagged", s.invalid_all_flagged()},
          {"passed", s.criteria_hold()}};
}

inline nlohmann::json to_json(const RunSummary& s) {
  nlohmann::json stages = nlohmann::json::object();
  for (const auto& [st, t] : s.per_stage) stages[std::string(name_of(st))] = to_json(t);
  nlohmann::json reqs = nlohmann::json::object();
  for (const auto& [id, t] : s.per_requirement) {
    reqs[id] = {{"exercised", t.exercised},
                {"detected", t.detected},
                {"missing", t.exercised - t.detected},
                {"finding_instances", t.instances}};
  }
  nlohmann::json arts = nlohmann::json::array();
  for (const auto& r : s.reports) arts.push_back(to_json(r));
  nlohmann::json totals = to_json(s.totals);
  totals["false_positives"] = s.false_positives;
  return {{"profile", s.profile},
          {"registry_version", s.registry_version},
          {"mode", name_of(s.mode)},
          {"substrate", s.substrate},
          {"totals", totals},
          {"per_stage", stages},
          {"per_requirement", reqs},
          {"criteria", criteria_json(s)},
          {"artifacts", arts}};
}

// ---------------------------------------------------------------------------
// Coverage

enum class Surface { certificate_spki, private_key };

inline std::string_view to_string(Surface s) {
  return s == Surface::certificate_spki ? "certificate-spki" : "private-key";
}

inline std::optional<Surface> parse_surface(std::string_view token) {
  if (token == "certificate-spki") return Surface::certificate_spki;
  if (token == "private-key") return Surface::private_key;
  return std::nullopt;
}

inline std::vector<GatePack> packs_of(Surface s) {
  if (s == Surface::private_key) return {GatePack::import_private_key};
  return {GatePack::ca_certificate_profile, GatePack::ca_spki_public_key};
}

inline bool surface_has_stage(Surface s, Stage st) {
  for (auto p : packs_of(s)) {
    if (placement_of(p).stage == st) return true;
  }
  return false;
}

struct CoverageRow {
  std::string id;
  GatePack gate_pack;
  Action action;
  RequirementTally tally;
  bool open_gap() const { return tally.exercised == 0 || tally.detected < tally.exercised; }
};

struct Coverage {
  Surface surface;
  Mode mode;
  std::vector<CoverageRow> rows;
  std::size_t invalid_artifacts = 0, invalid_met = 0, expected_labels = 0, labels_detected = 0;
  std::size_t valid_artifacts = 0, valid_passed = 0;

  std::size_t detected_requirements() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const CoverageRow& r) { return !r.open_gap(); }));
  }
  std::vector<std::string> open_gaps() const {
    std::vector<std::string> out;
    for (const auto& r : rows) {
      if (r.open_gap()) out.push_back(r.id);
    }
    return out;
  }
};

inline Coverage coverage_report(const RunSummary& s, const Registry& reg, Surface surface) {
  Coverage c{surface, s.mode, {}};
  const auto packs = packs_of(surface);
  for (const auto& rec : reg.records) {
    if (std::find(packs.begin(), packs.end(), rec.gate_pack) == packs.end()) continue;
    auto it = s.per_requirement.find(rec.id);
    c.rows.push_back({rec.id, rec.gate_pack, rec.action(s.mode).value_or(Action::block),
                      it == s.per_requirement.end() ? RequirementTally{} : it->second});
  }
  for (const auto& r : s.reports) {
    if (!surface_has_stage(surface, r.stage)) continue;
    if (r.valid) {
      ++c.valid_artifacts;
      if (r.disposition == Disposition::pass) ++c.valid_passed;
      continue;
    }
    ++c.invalid_artifacts;
    if (r.expected_met) ++c.invalid_met;
    c.expected_labels += r.expected_detection.size();
    c.labels_detected += r.expected_detection.size() - r.missing_expected.size();
  }
  return c;
}

inline nlohmann::json to_json(const Coverage& c) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : c.rows) {
    rows.push_back({{"requirement_id", r.id},
                    {"gate_pack", name_of(r.gate_pack)},
                    {"action", name_of(r.action)},
                    {"exercised", r.tally.exercised},
                    {"detected", r.tally.detected},
                    {"finding_instances", r.tally.instances},
                    {"status", r.open_gap() ? "open-gap" : "covered"}});
  }
  nlohmann::json packs = nlohmann::json::array();
  for (auto p : packs_of(c.surface)) packs.push_back(name_of(p));
  return {{"surface", to_string(c.surface)},
          {"mode", name_of(c.mode)},
          {"gate_packs", packs},
          {"requirement_count", c.rows.size()},
          {"requirements_detected", c.detected_requirements()},
          {"open_gaps", c.open_gaps()},
          {"invalid_artifacts", c.invalid_artifacts},
          {"invalid_artifacts_met", c.invalid_met},
          {"expected_labels", c.expected_labels},
          {"expected_labels_detected", c.labels_detected},
          {"valid_artifacts", c.valid_artifacts},
          {"valid_passed", c.valid_passed},
          {"requirements", rows}};
}

// ---------------------------------------------------------------------------
// Emission

inline void write_json(const fs::path& path, const nlohmann::json& j) {
  corpus::write_file(path, j.dump(2) + "\n");
}

inline nlohmann::json policy_summary(const RunSummary& s, const Registry& reg) {
  std::size_t block = 0, warn = 0;
  std::vector<std::string> warn_ids;
  nlohmann::json packs = nlohmann::json::object();
  for (auto p : kGatePacks) {
    const auto place = placement_of(p);
    packs[std::string(name_of(p))] = {{"owner", name_of(place.owner)}, {"stage", name_of(place.stage)},
                                      {"block", 0}, {"warn", 0}};
  }
  for (const auto& rec : reg.records) {
    const auto a = rec.action(s.mode).value_or(Action::block);
    auto& slot = packs[std::string(name_of(rec.gate_pack))];
    if (a == Action::block) {
      ++block;
      slot["block"] = slot["block"].get<int>() + 1;
    } else {
      ++warn;
      warn_ids.push_back(rec.id);
      slot["warn"] = slot["warn"].get<int>() + 1;
    }
  }
  return {{"profile", reg.profile},
          {"registry_version", reg.version},
          {"mode", name_of(s.mode)},
          {"requirement_count", reg.records.size()},
          {"block_count", block},
          {"warn_count", warn},
          {"warn_requirements", warn_ids},
          {"by_gate_pack", packs},
          {"observed_dispositions", to_json(s.totals)},
          {"false_positives", s.false_positives},
          {"criteria", criteria_json(s)}};
}

inline std::vector<fs::path> emit_reports(const RunSummary& s, const Registry& reg, const fs::path& out_dir) {
  const std::string m(name_of(s.mode));
  const std::vector<std::pair<fs::path, nlohmann::json>> files = {
      {out_dir / ("extended_registry_summary_" + m + ".json"), to_json(s)},
      {out_dir / ("policy_summary_" + m + ".json"), policy_summary(s, reg)},
      {out_dir / ("certificate_spki_coverage_" + m + ".json"), to_json(coverage_report(s, reg, Surface::certificate_spki))},
      {out_dir / ("private_key_coverage_" + m + ".json"), to_json(coverage_report(s, reg, Surface::private_key))},
  };
  std::vector<fs::path> written;
  for (const auto& [path, doc] : files) {
    write_json(path, doc);
    written.push_back(path);
  }
  return written;
}

}  // namespace pqassure::eval
