// pq-assure: operator entry points for the pkix-core assurance pipeline.
//
// Exit codes: 0 pass, 1 assurance failure, 2 infrastructure failure, 64 usage.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pqassure/corpus.hpp"
#include "pqassure/evaluator.hpp"
#include "pqassure/pipeline.hpp"
#include "pqassure/policy.hpp"
#include "pqassure/registry.hpp"
#include "pqassure/substrate.hpp"

namespace fs = std::filesystem;
using namespace pqassure;
using pipeline::ExitCode;

namespace {

struct Options {
  std::string mode = "deployable";
  std::string registry = "requirements.json";
  bool registry_given = false;
  std::string corpus = "corpus/manifest.jsonl";
  std::string out = "results";
  std::string bridge;
  std::string surface;
  std::string pack;
  std::string param_set, seed_hex, expanded_hex;
  std::string export_path = "requirements.json";
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

Registry load_selected_registry(const Options& o) {
  if (o.registry_given || fs::exists(o.registry)) return load_registry(o.registry);
  return builtin_registry();
}

Mode selected_mode(const Options& o) {
  const auto m = parse_enum<Mode>(o.mode);
  if (!m) throw UsageError("--mode must be strict or deployable");
  return *m;
}

pipeline::Config make_config(const Options& o) {
  pipeline::Config cfg;
  cfg.manifest = o.corpus;
  cfg.out_dir = o.out;
  cfg.registry = load_selected_registry(o);
  cfg.substrate = substrate::resolve_substrate(o.bridge.empty() ? std::nullopt : std::optional(o.bridge));
  return cfg;
}

int cmd_validate_registry(const Options& o) {
  const auto reg = load_selected_registry(o);
  const auto report = validate_registry(reg, ProfileExpectations::pkix_core());
  std::cout << to_json(report).dump(2) << "\n";
  return report.clean() ? ExitCode::kPass : ExitCode::kAssuranceFailure;
}

int cmd_export_registry(const Options& o) {
  corpus::write_file(o.export_path, dump_registry(builtin_registry()));
  std::cout << "wrote " << o.export_path << "\n";
  return ExitCode::kPass;
}

int cmd_gen_corpus(const Options& o) {
  const fs::path manifest = o.corpus;
  corpus::generate_corpus(manifest.parent_path());
  const auto rep = corpus::verify_manifest(manifest.parent_path() / "manifest.jsonl");
  std::cout << corpus::to_json(rep).dump(2) << "\n";
  return rep.clean() && rep.entries == pipeline::kCorpusSize ? ExitCode::kPass : ExitCode::kAssuranceFailure;
}

int cmd_evaluate(const Options& o) {
  const auto cfg = make_config(o);
  const auto s = pipeline::run_evaluate(cfg, selected_mode(o));
  std::cout << pipeline::summary_line(s) << "\n";
  for (const auto& r : s.reports) {
    if (r.error) std::cout << "  " << r.artifact_id << ": " << r.error_kind << ": " << *r.error << "\n";
    for (const auto& id : r.missing_expected) std::cout << "  " << r.artifact_id << ": missing " << id << "\n";
    for (const auto& id : r.unexpected) std::cout << "  " << r.artifact_id << ": unexpected " << id << "\n";
  }
  return pipeline::exit_code_for(s);
}

int cmd_coverage(const Options& o) {
  const auto surface = eval::parse_surface(o.surface);
  if (!surface) throw UsageError("--surface must be certificate-spki or private-key");
  const auto cfg = make_config(o);
  const auto mode = selected_mode(o);
  const auto c = pipeline::run_coverage(cfg, *surface, mode);
  std::cout << eval::to_string(*surface) << " " << name_of(mode) << ": " << c.detected_requirements() << "/"
            << c.rows.size() << " requirements detected, " << c.open_gaps().size() << " open gap(s)\n";
  return c.open_gaps().empty() ? ExitCode::kPass : ExitCode::kAssuranceFailure;
}

int cmd_gate_pack(const Options& o) {
  const auto pack = parse_enum<GatePack>(o.pack);
  if (!pack) throw UsageError("unknown gate pack: " + o.pack);
  const auto cfg = make_config(o);
  const auto run = pipeline::run_gate_pack(cfg, *pack, selected_mode(o));
  std::cout << name_of(*pack) << " (owner " << run.document["owner"].get<std::string>() << "): "
            << run.document["requirements_detected"].get<std::size_t>() << "/"
            << run.document["requirement_count"].get<std::size_t>() << " requirements detected; "
            << pipeline::summary_line(run.summary) << "\n";
  return pipeline::exit_code_for(run.summary);
}

int cmd_workflow(const Options& o) {
  const auto reg = load_selected_registry(o);
  for (const auto& p : policy::emit_workflow(reg, o.out)) std::cout << "wrote " << p.string() << "\n";
  return ExitCode::kPass;
}

int cmd_bridge_check(const Options& o) {
  const auto ps = pkix::parse_parameter_set(o.param_set);
  if (!ps) throw UsageError("unknown parameter set: " + o.param_set);
  Bytes seed, expanded;
  try {
    seed = from_hex(o.seed_hex);
    expanded = from_hex(o.expanded_hex);
  } catch (const std::exception& e) {
    throw UsageError(std::string("bad hex: ") + e.what());
  }
  const auto sub = substrate::resolve_substrate(o.bridge.empty() ? std::nullopt : std::optional(o.bridge));
  const auto v = sub.check_consistency(*ps, seed, expanded);
  std::cout << v.describe() << "\n";
  switch (v.kind) {
    case substrate::Verdict::consistent: return 0;
    case substrate::Verdict::mismatch: return 1;
    case substrate::Verdict::bridge_failure: return 2;
  }
  return 2;
}

int cmd_replay(const Options& o) {
  const auto cfg = make_config(o);
  return pipeline::replay(cfg, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pq-assure: ML-KEM / ML-DSA PKIX artifact assurance"};
  app.require_subcommand(1);
  Options o;

  app.add_option("--mode", o.mode, "strict or deployable")->check(CLI::IsMember({"strict", "deployable"}));
  app.add_option("--registry", o.registry, "registry JSON (builtin when the default is absent)")
      ->each([&](const std::string&) { o.registry_given = true; });
  app.add_option("--corpus", o.corpus, "corpus manifest path");
  app.add_option("--out", o.out, "output directory");
  app.add_option("--bridge", o.bridge, "consistency bridge executable (overrides PQ_ASSURE_BRIDGE)");
  app.fallthrough();

  int rc = 0;
  const auto bind = [&](CLI::App* sub, int (*fn)(const Options&)) { sub->callback([&, fn] { rc = fn(o); }); };

  bind(app.add_subcommand("validate-registry", "validate the registry and print the report"), cmd_validate_registry);
  auto* exp = app.add_subcommand("export-registry", "write the builtin registry as JSON");
  exp->add_option("path", o.export_path, "destination file");
  bind(exp, cmd_export_registry);
  bind(app.add_subcommand("gen-corpus", "generate valid and mutated artifacts plus the manifest"), cmd_gen_corpus);
  bind(app.add_subcommand("evaluate", "evaluate the corpus and emit per-mode reports"), cmd_evaluate);
  auto* cov = app.add_subcommand("coverage", "emit a coverage report for one surface");
  cov->add_option("--surface", o.surface, "certificate-spki or private-key")->required();
  bind(cov, cmd_coverage);
  auto* gp = app.add_subcommand("gate-pack", "evaluate one gate pack at its stage");
  gp->add_option("--pack", o.pack, "gate pack token")->required();
  bind(gp, cmd_gate_pack);
  bind(app.add_subcommand("workflow", "emit registry-derived workflow and operator views"), cmd_workflow);
  auto* bc = app.add_subcommand("bridge-check", "check one seed/expanded pair");
  bc->add_option("--param-set", o.param_set)->required();
  bc->add_option("--seed-hex", o.seed_hex)->required();
  bc->add_option("--expanded-hex", o.expanded_hex)->required();
  bind(bc, cmd_bridge_check);
  bind(app.add_subcommand("replay", "run the full pipeline in canonical order"), cmd_replay);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return ExitCode::kUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return ExitCode::kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCode::kInfrastructureFailure;
  }
  return rc;
}
