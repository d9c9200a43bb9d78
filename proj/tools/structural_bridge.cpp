// Reference bridge executable speaking the consistency protocol:
//   structural_bridge <param-set> <seed-hex> <expanded-hex>
// exits 0 when the expanded key is the structural expansion of the seed,
// 1 when it is not, 2 on malformed input.

#include <iostream>

#include "pqassure/substrate.hpp"

int main(int argc, char** argv) {
  using namespace pqassure;
  if (argc != 4) {
    std::cerr << "usage: structural_bridge <param-set> <seed-hex> <expanded-hex>\n";
    return 2;
  }
  const auto ps = pkix::parse_parameter_set(argv[1]);
  if (!ps) {
    std::cerr << "unknown parameter set " << argv[1] << "\n";
    return 2;
  }
  try {
    const auto v = substrate::check_structural(*ps, from_hex(argv[2]), from_hex(argv[3]));
    return v.kind == substrate::Verdict::consistent ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}
