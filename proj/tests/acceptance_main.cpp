// Acceptance gate: runs the end-to-end checks and prints one verdict per
// criterion.  Exits non-zero if any criterion fails.
#include <cstdio>
#include <vector>

#include "gfmatch/verify.hpp"

int main() {
  const std::vector<gfm::Check> checks = gfm::verify_acceptance();
  int failed = 0;
  int idx = 0;
  for (const gfm::Check& c : checks) {
    ++idx;
    std::printf("criterion %d (%s): %s - %s\n", idx, c.name.c_str(),
                c.pass ? "PASS" : "FAIL", c.detail.c_str());
    std::fflush(stdout);
    if (!c.pass) ++failed;
  }
  if (failed == 0) {
    std::printf("acceptance: all %d criteria passed\n", idx);
    return 0;
  }
  std::printf("acceptance: %d of %d criteria FAILED\n", failed, idx);
  return 1;
}
