#pragma once

#include <string>
#include <vector>

namespace gfm {

struct Check {
  std::string name;
  bool pass{};
  std::string detail;
};

// Fast self-checks of the analysis layer: frozen design values, closed-form
// identities, certificate evaluation. Runs in well under a second.
std::vector<Check> verify_quick();

// Full sweep: drives every preset end to end and checks regulation,
// amplitude tracking, power sharing, energy monotonicity, design exactness,
// frame consistency and reproducibility. Takes on the order of a minute.
std::vector<Check> verify_acceptance();

}  // namespace gfm
