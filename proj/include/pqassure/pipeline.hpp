#pragma once

// Composite runs shared by the CLI and the acceptance harness: evaluation
// with report emission, gate-pack slices, environment capture and the full
// replay sequence.

#include <openssl/crypto.h>
#include <sys/utsname.h>

#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "pqassure/corpus.hpp"
#include "pqassure/evaluator.hpp"
#include "pqassure/policy.hpp"
#include "pqassure/registry.hpp"
#include "pqassure/substrate.hpp"

namespace pqassure::pipeline {

namespace fs = std::filesystem;

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr std::size_t kCorpusSize = 48;

enum ExitCode : int { kPass = 0, kAssuranceFailure = 1, kInfrastructureFailure = 2, kUsage = 64 };

struct Config {
  fs::path manifest = "corpus/manifest.jsonl";
  fs::path out_dir = "results";
  Registry registry;
  substrate::Substrate substrate = substrate::Substrate::structural();

  fs::path corpus_dir() const { return manifest.parent_path(); }
};

inline int exit_code_for(const eval::RunSummary& s) {
  if (s.infrastructure_failure()) return kInfrastructureFailure;
  return s.criteria_hold() ? kPass : kAssuranceFailure;
}

inline std::string summary_line(const eval::RunSummary& s) {
  std::ostringstream os;
  os << name_of(s.mode) << ": " << s.totals.artifacts << " artifacts (" << s.totals.valid << " valid, "
     << s.totals.invalid << " invalid); block " << s.totals.block << ", warn " << s.totals.warn << ", pass "
     << s.totals.pass << ", error " << s.totals.error << "; false positives " << s.false_positives << "; criteria "
     << (s.criteria_hold() ? "hold" : "fail");
  return os.str();
}

inline eval::RunSummary run_evaluate(const Config& cfg, Mode mode) {
  const auto entries = corpus::read_manifest(cfg.manifest);
  auto s = eval::evaluate_corpus(entries, cfg.corpus_dir(), cfg.registry, mode, cfg.substrate);
  eval::emit_reports(s, cfg.registry, cfg.out_dir);
  return s;
}

inline fs::path coverage_path(const fs::path& out_dir, eval::Surface surface, Mode mode) {
  const std::string stem = surface == eval::Surface::certificate_spki ? "certificate_spki_coverage_" : "private_key_coverage_";
  return out_dir / (stem + std::string(name_of(mode)) + ".json");
}

inline eval::Coverage run_coverage(const Config& cfg, eval::Surface surface, Mode mode) {
  const auto entries = corpus::read_manifest(cfg.manifest);
  std::vector<corpus::ManifestEntry> slice;
  for (const auto& e : entries) {
    if (eval::surface_has_stage(surface, e.stage)) slice.push_back(e);
  }
  const auto s = eval::evaluate_corpus(slice, cfg.corpus_dir(), cfg.registry, mode, cfg.substrate);
  auto c = eval::coverage_report(s, cfg.registry, surface);
  eval::write_json(coverage_path(cfg.out_dir, surface, mode), eval::to_json(c));
  return c;
}

struct GatePackRun {
  GatePack pack;
  eval::RunSummary summary;
  nlohmann::json document;
};

// The pack's sub-registry over the artifacts at the pack's stage.
inline GatePackRun run_gate_pack(const Config& cfg, GatePack pack, Mode mode) {
  const auto place = placement_of(pack);
  const Registry sub = cfg.registry.subset(pack);
  std::vector<corpus::ManifestEntry> slice;
  for (const auto& e : corpus::read_manifest(cfg.manifest)) {
    if (e.stage == place.stage) slice.push_back(e);
  }
  auto s = eval::evaluate_corpus(slice, cfg.corpus_dir(), sub, mode, cfg.substrate);

  nlohmann::json reqs = nlohmann::json::array();
  std::size_t detected = 0;
  for (const auto& rec : sub.records) {
    const auto& t = s.per_requirement[rec.id];
    const bool covered = t.exercised > 0 && t.detected == t.exercised;
    detected += covered;
    reqs.push_back({{"requirement_id", rec.id},
                    {"action", policy::action_name(rec, mode)},
                    {"exercised", t.exercised},
                    {"detected", t.detected},
                    {"status", covered ? "covered" : "open-gap"}});
  }
  nlohmann::json arts = nlohmann::json::array();
  for (const auto& r : s.reports) {
    arts.push_back({{"artifact_id", r.artifact_id},
                    {"validity", r.valid ? "valid" : "invalid"},
                    {"disposition", eval::to_string(r.disposition)},
                    {"unique_requirements", r.detection.unique_requirements},
                    {"expected_met", r.expected_met}});
  }
  nlohmann::json totals = eval::to_json(s.totals);
  totals["false_positives"] = s.false_positives;
  nlohmann::json doc = {{"gate_pack", name_of(pack)},
                        {"owner", name_of(place.owner)},
                        {"stage", name_of(place.stage)},
                        {"mode", name_of(mode)},
                        {"profile", cfg.registry.profile},
                        {"registry_version", cfg.registry.version},
                        {"requirement_count", sub.records.size()},
                        {"requirements_detected", detected},
                        {"requirements", reqs},
                        {"totals", totals},
                        {"criteria", eval::criteria_json(s)},
                        {"artifacts", arts}};
  eval::write_json(cfg.out_dir / ("gate_pack_" + std::string(name_of(pack)) + "_" + std::string(name_of(mode)) + ".json"),
                   doc);
  return {pack, std::move(s), std::move(doc)};
}

// Toolchain and platform only; no clock, host name or kernel build string,
// so repeated replays stay byte-identical.
inline std::string environment_text(const Config& cfg) {
  std::ostringstream os;
  os << "tool: pq-assure " << kToolVersion << "\n";
  os << "profile: " << cfg.registry.profile << " " << cfg.registry.version << "\n";
#if defined(__clang__)
  os << "compiler: clang " << __clang_version__ << "\n";
#elif defined(__GNUC__)
  os << "compiler: gcc " << __VERSION__ << "\n";
#endif
  os << "c++: " << __cplusplus << "\n";
  os << "openssl: " << OpenSSL_version(OPENSSL_VERSION) << "\n";
  struct utsname u {};
  if (::uname(&u) == 0) os << "platform: " << u.sysname << " " << u.machine << "\n";
  os << "substrate: " << cfg.substrate.describe() << "\n";
  return os.str();
}

inline fs::path write_environment(const Config& cfg) {
  const fs::path p = cfg.out_dir / "environment.txt";
  corpus::write_file(p, environment_text(cfg));
  return p;
}

// Step order follows the canonical replay: environment, corpus, both-mode
// evaluation, coverage, workflow and gate packs, manifest verification.
inline int replay(const Config& cfg, std::ostream& log) {
  const auto step = [&](std::string_view id, std::string_view what) { log << id << " " << what << "\n"; };
  try {
    step("STEP-01", "environment capture");
    write_environment(cfg);

    const auto report = validate_registry(cfg.registry, ProfileExpectations::pkix_core());
    if (!report.clean()) {
      log << "registry validation failed: " << report.violations.size() << " violation(s)\n";
      return kAssuranceFailure;
    }

    step("STEP-04..06", "corpus generation");
    corpus::generate_corpus(cfg.corpus_dir());
    if (const auto v = corpus::verify_manifest(cfg.manifest); !v.clean() || v.entries != kCorpusSize) {
      log << "corpus verification failed\n";
      return kAssuranceFailure;
    }

    for (auto m : kModes) {
      step(m == Mode::strict ? "STEP-07" : "STEP-08", "evaluate --mode " + std::string(name_of(m)));
      const auto s = run_evaluate(cfg, m);
      log << "  " << summary_line(s) << "\n";
      if (const int rc = exit_code_for(s); rc != kPass) return rc;
    }

    for (auto m : kModes) {
      step("STEP-09/10", "coverage --mode " + std::string(name_of(m)));
      for (auto surface : {eval::Surface::certificate_spki, eval::Surface::private_key}) {
        const auto c = run_coverage(cfg, surface, m);
        if (!c.open_gaps().empty()) {
          log << "  open gaps on " << eval::to_string(surface) << "\n";
          return kAssuranceFailure;
        }
      }
    }

    step("STEP-14", "workflow and gate packs");
    policy::emit_workflow(cfg.registry, cfg.out_dir);
    for (auto m : kModes) {
      for (auto p : kGatePacks) {
        const auto g = run_gate_pack(cfg, p, m);
        if (const int rc = exit_code_for(g.summary); rc != kPass) return rc;
      }
    }

    step("VERIFY", "manifest hashes");
    if (!corpus::verify_manifest(cfg.manifest).clean()) return kAssuranceFailure;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kInfrastructureFailure;
  }
  log << "replay complete\n";
  return kPass;
}

}  // namespace pqassure::pipeline
