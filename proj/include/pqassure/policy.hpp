#pragma once

// Registry-only views for operators: who owns what, what each mode does, and
// which commands and outputs serve each gate pack. Nothing here reads the
// corpus, so the views are stable for a given registry.

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pqassure/corpus.hpp"
#include "pqassure/registry.hpp"

namespace pqassure::policy {

namespace fs = std::filesystem;

struct PackRecipe {
  GatePack pack;
  std::string default_mode;
  std::vector<std::string> commands;
  std::vector<std::string> outputs;
  std::string decision;
};

inline const std::vector<PackRecipe>& recipes() {
  static const std::vector<PackRecipe> table = {
      {GatePack::ca_certificate_profile,
       "deployable",
       {"pq-assure evaluate --mode deployable", "pq-assure coverage --surface certificate-spki --mode deployable",
        "pq-assure gate-pack --pack ca-certificate-profile --mode deployable"},
       {"extended_registry_summary_*.json", "policy_summary_*.json", "certificate_spki_coverage_*.json",
        "operator_readiness_summary.json"},
       "issue, hold, or block on certificate-profile semantics before issuance"},
      {GatePack::ca_spki_public_key,
       "deployable",
       {"pq-assure evaluate --mode deployable", "pq-assure coverage --surface certificate-spki --mode deployable",
        "pq-assure gate-pack --pack ca-spki-public-key --mode deployable"},
       {"extended_registry_summary_*.json", "policy_summary_*.json", "certificate_spki_coverage_*.json",
        "operator_gate_matrix.json"},
       "issue, hold, or block on SPKI structure, parameters, and key material before issuance"},
      {GatePack::import_private_key,
       "deployable or strict",
       {"pq-assure bridge-check --param-set <token> --seed-hex <hex> --expanded-hex <hex>",
        "pq-assure evaluate --mode <mode>", "pq-assure coverage --surface private-key --mode <mode>",
        "pq-assure gate-pack --pack import-private-key --mode <mode>"},
       {"private_key_coverage_*.json", "extended_registry_summary_*.json", "policy_summary_*.json",
        "operator_gate_matrix.json"},
       "import, reject, or escalate on container form, length, and consistency before use"},
  };
  return table;
}

inline const PackRecipe& recipe_for(GatePack p) {
  for (const auto& r : recipes()) {
    if (r.pack == p) return r;
  }
  throw std::out_of_range("no recipe for gate pack");
}

inline std::string action_name(const RequirementRecord& rec, Mode m) {
  const auto a = rec.action(m);
  return a ? std::string(name_of(*a)) : "unset";
}

inline std::string csv_row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    const auto& c = cells[i];
    if (c.find_first_of(",\"\n") == std::string::npos) {
      out += c;
      continue;
    }
    out += '"';
    for (char ch : c) {
      if (ch == '"') out += '"';
      out += ch;
    }
    out += '"';
  }
  return out + "\n";
}

inline std::string policy_matrix_csv(const Registry& reg) {
  std::string out = csv_row({"id", "owner", "stage", "gate_pack", "detector_kind", "normative_strength", "strict",
                             "deployable"});
  for (const auto& r : reg.records) {
    out += csv_row({r.id, std::string(name_of(r.owner)), std::string(name_of(r.stage)),
                    std::string(name_of(r.gate_pack)), std::string(name_of(r.detector_kind)),
                    std::string(name_of(r.normative_strength)), action_name(r, Mode::strict),
                    action_name(r, Mode::deployable)});
  }
  return out;
}

inline nlohmann::json stage_owner_summary(const Registry& reg) {
  nlohmann::json stages = nlohmann::json::object();
  nlohmann::json owners = nlohmann::json::object();
  for (const auto& e : EnumNames<Stage>::table) stages[std::string(e.second)] = 0;
  for (const auto& e : EnumNames<Owner>::table) owners[std::string(e.second)] = 0;
  for (const auto& r : reg.records) {
    auto& s = stages[std::string(name_of(r.stage))];
    s = s.get<int>() + 1;
    auto& o = owners[std::string(name_of(r.owner))];
    o = o.get<int>() + 1;
  }
  nlohmann::json packs = nlohmann::json::array();
  for (auto p : kGatePacks) {
    const auto place = placement_of(p);
    packs.push_back({{"gate_pack", name_of(p)},
                     {"owner", name_of(place.owner)},
                     {"stage", name_of(place.stage)},
                     {"artifact_type", name_of(place.artifact_type)},
                     {"requirements", reg.subset(p).records.size()}});
  }
  return {{"profile", reg.profile},
          {"registry_version", reg.version},
          {"requirement_count", reg.records.size()},
          {"stages", stages},
          {"owners", owners},
          {"gate_packs", packs},
          {"runtime_consumer", {{"owner", name_of(Owner::runtime_consumer)},
                                {"stage", name_of(Stage::runtime_consumer)},
                                {"active_requirements", 0},
                                {"boundary", "explicit"}}}};
}

struct GateRow {
  GatePack pack;
  const RequirementRecord* record;
  Mode mode;
  std::string action;
};

// One row per (mode, requirement), modes in strict-then-deployable order.
inline std::vector<GateRow> operator_gate_rows(const Registry& reg) {
  std::vector<GateRow> rows;
  for (auto m : kModes) {
    for (auto p : kGatePacks) {
      for (const auto& r : reg.records) {
        if (r.gate_pack == p) rows.push_back({p, &r, m, action_name(r, m)});
      }
    }
  }
  return rows;
}

inline nlohmann::json operator_gate_matrix(const Registry& reg) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& g : operator_gate_rows(reg)) {
    rows.push_back({{"mode", name_of(g.mode)},
                    {"gate_pack", name_of(g.pack)},
                    {"owner", name_of(g.record->owner)},
                    {"stage", name_of(g.record->stage)},
                    {"requirement_id", g.record->id},
                    {"detector_kind", name_of(g.record->detector_kind)},
                    {"action", g.action}});
  }
  return {{"profile", reg.profile}, {"registry_version", reg.version}, {"rows", rows}};
}

inline std::string operator_gate_matrix_csv(const Registry& reg) {
  std::string out = csv_row({"mode", "gate_pack", "owner", "stage", "requirement_id", "detector_kind", "action"});
  for (const auto& g : operator_gate_rows(reg)) {
    out += csv_row({std::string(name_of(g.mode)), std::string(name_of(g.pack)), std::string(name_of(g.record->owner)),
                    std::string(name_of(g.record->stage)), g.record->id, std::string(name_of(g.record->detector_kind)),
                    g.action});
  }
  return out;
}

inline nlohmann::json operator_readiness_summary(const Registry& reg) {
  const auto report = validate_registry(reg, ProfileExpectations::pkix_core());
  nlohmann::json packs = nlohmann::json::array();
  for (const auto& rc : recipes()) {
    const auto place = placement_of(rc.pack);
    const auto sub = reg.subset(rc.pack);
    nlohmann::json modes = nlohmann::json::object();
    for (auto m : kModes) {
      int block = 0, warn = 0;
      for (const auto& r : sub.records) ++(action_name(r, m) == "warn" ? warn : block);
      modes[std::string(name_of(m))] = {{"block", block}, {"warn", warn}};
    }
    packs.push_back({{"gate_pack", name_of(rc.pack)},
                     {"owner", name_of(place.owner)},
                     {"stage", name_of(place.stage)},
                     {"default_mode", rc.default_mode},
                     {"requirement_count", sub.records.size()},
                     {"modes", modes},
                     {"commands", rc.commands},
                     {"outputs", rc.outputs},
                     {"decision", rc.decision}});
  }
  return {{"profile", reg.profile},
          {"registry_version", reg.version},
          {"registry_clean", report.clean()},
          {"default_mode", "deployable"},
          {"gate_packs", packs}};
}

inline nlohmann::json reference_workflow(const Registry& reg) {
  nlohmann::json steps = nlohmann::json::array();
  int order = 1;
  for (auto p : kGatePacks) {
    const auto place = placement_of(p);
    std::vector<std::string> ids;
    for (const auto& r : reg.subset(p).records) ids.push_back(r.id);
    steps.push_back({{"order", order++},
                     {"owner", name_of(place.owner)},
                     {"stage", name_of(place.stage)},
                     {"gate_pack", name_of(p)},
                     {"artifact_type", name_of(place.artifact_type)},
                     {"requirements", ids},
                     {"decision", recipe_for(p).decision}});
  }
  steps.push_back({{"order", order},
                   {"owner", name_of(Owner::runtime_consumer)},
                   {"stage", name_of(Stage::runtime_consumer)},
                   {"gate_pack", nullptr},
                   {"artifact_type", nullptr},
                   {"requirements", nlohmann::json::array()},
                   {"decision", "explicit boundary; no active requirements in this profile"}});
  return {{"profile", reg.profile}, {"registry_version", reg.version}, {"steps", steps}};
}

inline std::string reference_workflow_md(const Registry& reg) {
  std::ostringstream md;
  md << "# Reference workflow (" << reg.profile << ", " << reg.version << ")\n\n";
  md << "| Order | Owner | Stage | Gate pack | Requirements | strict | deployable |\n";
  md << "|---|---|---|---|---|---|---|\n";
  int order = 1;
  for (auto p : kGatePacks) {
    const auto place = placement_of(p);
    const auto sub = reg.subset(p);
    int strict_block = 0, dep_block = 0, dep_warn = 0;
    for (const auto& r : sub.records) {
      strict_block += action_name(r, Mode::strict) == "block";
      (action_name(r, Mode::deployable) == "block" ? dep_block : dep_warn)++;
    }
    md << "| " << order++ << " | " << name_of(place.owner) << " | " << name_of(place.stage) << " | "
       << name_of(p) << " | " << sub.records.size() << " | " << strict_block << " block | " << dep_block
       << " block" << (dep_warn ? ", " + std::to_string(dep_warn) + " warn" : "") << " |\n";
  }
  md << "| " << order << " | " << name_of(Owner::runtime_consumer) << " | " << name_of(Stage::runtime_consumer)
     << " | - | 0 | - | - |\n\n";

  for (const auto& rc : recipes()) {
    md << "## " << name_of(rc.pack) << "\n\n";
    md << "Default mode: " << rc.default_mode << "\n\n";
    for (const auto& c : rc.commands) md << "    " << c << "\n";
    md << "\nInspect:";
    for (const auto& o : rc.outputs) md << " `" << o << "`";
    md << "\n\nDecision: " << rc.decision << ".\n\n";
    for (const auto& r : reg.subset(rc.pack).records) {
      md << "- `" << r.id << "` (" << name_of(r.normative_strength) << ", " << name_of(r.detector_kind)
         << "): " << r.requirement << "\n";
    }
    md << "\n";
  }
  return md.str();
}

inline std::vector<fs::path> emit_workflow(const Registry& reg, const fs::path& out_dir) {
  const auto json_text = [](const nlohmann::json& j) { return j.dump(2) + "\n"; };
  const std::vector<std::pair<std::string, std::string>> files = {
      {"policy_matrix.csv", policy_matrix_csv(reg)},
      {"stage_owner_summary.json", json_text(stage_owner_summary(reg))},
      {"operator_gate_matrix.json", json_text(operator_gate_matrix(reg))},
      {"operator_gate_matrix.csv", operator_gate_matrix_csv(reg)},
      {"operator_readiness_summary.json", json_text(operator_readiness_summary(reg))},
      {"reference_workflow.json", json_text(reference_workflow(reg))},
      {"reference_workflow.md", reference_workflow_md(reg)},
  };
  std::vector<fs::path> written;
  for (const auto& [name, text] : files) {
    corpus::write_file(out_dir / name, text);
    written.push_back(out_dir / name);
  }
  return written;
}

}  // namespace pqassure::policy
