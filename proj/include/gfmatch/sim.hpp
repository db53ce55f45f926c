#pragma once

#include <string>
#include <vector>

#include "gfmatch/config.hpp"
#include "gfmatch/timeseries.hpp"

namespace gfm {

struct SimResult {
  TimeSeries ts;
  long monitor_violations{};   // storage-energy increases beyond slack
  long monitor_steps{};        // steps the monitor actually checked
  double wall_seconds{};
  std::vector<std::string> warnings;
};

// Fixed-step deterministic simulation of the configured model: composes the
// plant with the configured amplitude controller, applies timed events
// (re-deriving load-dependent controller constants when the load moves),
// checks the storage-energy monitor every step, and returns the decimated
// trajectory table.
SimResult run_simulation(const SimConfig& cfg);

}  // namespace gfm
