// Library usage: inspect one PEM or DER artifact against the builtin
// registry and print findings and the disposition in both modes.
//
//   sample_inspect <certificate|spki|private-key-container> <file>

#include <iostream>

#include "pqassure/corpus.hpp"
#include "pqassure/evaluator.hpp"

int main(int argc, char** argv) {
  using namespace pqassure;
  if (argc != 3) {
    std::cerr << "usage: sample_inspect <certificate|spki|private-key-container> <file>\n";
    return 64;
  }
  const auto type = parse_enum<ArtifactType>(argv[1]);
  if (!type) {
    std::cerr << "unknown artifact type " << argv[1] << "\n";
    return 64;
  }
  try {
    const Registry reg = builtin_registry();
    const Bytes der = pem::to_der(corpus::read_file(argv[2]), corpus::pem_label(*type));
    const auto result = eval::run_detectors(*type, der, reg, substrate::resolve_substrate(std::nullopt));
    for (const auto& f : result.findings) {
      std::cout << f.requirement_id << " @ " << f.locus << ": " << f.detail << "\n";
    }
    if (result.evaluation_error) std::cout << "evaluation error: " << *result.evaluation_error << "\n";
    for (auto m : kModes) {
      std::cout << name_of(m) << ": " << eval::to_string(eval::disposition_for(result, reg, m)) << "\n";
    }
    return result.findings.empty() && !result.evaluation_error ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
