#pragma once

#include <stdexcept>
#include <string>

namespace gfm {

// Bad user input: config file, CLI values, invalid parameter combinations.
// The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A requested operating point does not exist (no positive modulation root,
// power beyond the nose point, no synchronized solution, ...).
// The CLI maps this to exit code 3.
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Integration produced a non-finite or absurdly large state.
// The CLI maps this to exit code 3.
struct BlowupError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gfm
