#include "gfmatch/presets.hpp"

#include "gfmatch/errors.hpp"

namespace gfm {

namespace {

// Shared base case: rated 1 kV dc link feeding a 0.06 S resistive ac load,
// dc source dispatched at 100 A with PI trim.
SimConfig base_single() {
  SimConfig c;
  c.kind = ModelKind::SingleAb;
  c.load.g_l = 0.06;
  c.pid = {100.0, 1.0, 10.0, 0.0};
  c.sim.t_end = 1.0;
  c.events.push_back({0.5, "scale", "g_l", 1.55});
  return c;
}

}  // namespace

SimConfig preset_config(const std::string& name) {
  if (name == "single-pid-feedforward") {
    SimConfig c = base_single();
    c.ctrl = CtrlKind::Feedforward;
    return c;
  }
  if (name == "single-pid-pipbc") {
    SimConfig c = base_single();
    c.kind = ModelKind::SingleDq;
    c.ctrl = CtrlKind::PiPbc;
    c.pipbc = {0.1, 10.0};
    // The amplitude loop adds a pole near kappa_p * v_dc_ref^2 / L, a few
    // 1e8 rad/s here, so the step must shrink accordingly.
    c.sim.dt = 2e-8;
    c.sim.decimate = 50000;
    return c;
  }
  if (name == "single-pid-droop") {
    SimConfig c = base_single();
    c.ctrl = CtrlKind::Droop;
    c.droop = {0.33, 1e-5, 1e4};
    return c;
  }
  if (name == "parallel-sharing") {
    SimConfig c;
    c.kind = ModelKind::Network;
    c.ctrl = CtrlKind::None;
    c.conv.g_dc = 0.0;  // dispatch ratios stay exact without dc self-load
    c.pid = {100.0, 2.0, 0.0, 0.0};
    c.net.pid2 = {100.0 / 3.0, 2.0 / 3.0, 0.0, 0.0};
    c.mu_fixed = 0.33;
    c.net.mu2 = 0.33;
    c.net.g_net = 0.10;
    c.net.init_equilibrium = true;
    c.sim.t_end = 1.2;
    c.events.push_back({0.3, "set", "g_net", 0.104});
    c.events.push_back({0.7, "set", "g_net", 0.108});
    return c;
  }
  if (name == "matching-vs-sm") {
    SimConfig c;
    c.kind = ModelKind::Machine;
    c.ctrl = CtrlKind::None;
    c.load.g_l = 0.06;
    c.mu_fixed = 0.33;
    c.pid = {100.0, 0.0, 0.0, 0.0};
    c.sim.t_end = 0.1;
    return c;
  }
  throw ConfigError("unknown preset: " + name);
}

std::vector<std::string> preset_names() {
  return {"single-pid-feedforward", "single-pid-pipbc", "single-pid-droop",
          "parallel-sharing", "matching-vs-sm"};
}

}  // namespace gfm
