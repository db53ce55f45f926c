#pragma once

#include <string>
#include <vector>

#include "gfmatch/config.hpp"

namespace gfm {

// Ready-made study cases. Each returns a fully populated config; unknown
// names raise ConfigError.
//
//   single-pid-feedforward  dc PI + exact-amplitude feedforward, load step
//   single-pid-pipbc        dc PI + passivity-based amplitude PI, load step
//   single-pid-droop        dc PI + amplitude droop, load step
//   parallel-sharing        two converters on a common bus, 3:1 dispatch,
//                           two load steps
//   matching-vs-sm          machine surrogate of the fixed-dispatch converter
SimConfig preset_config(const std::string& name);

std::vector<std::string> preset_names();

}  // namespace gfm
