#pragma once

#include <string>
#include <vector>

#include "gfmatch/analysis.hpp"
#include "gfmatch/control.hpp"
#include "gfmatch/params.hpp"

namespace gfm {

enum class ModelKind { SingleAb, SingleDq, Machine, Network };
enum class CtrlKind { None, Feedforward, PiPbc, Droop };

std::string to_string(ModelKind k);
std::string to_string(CtrlKind k);
ModelKind model_kind_from_string(const std::string& s);    // throws ConfigError
CtrlKind ctrl_kind_from_string(const std::string& s);      // throws ConfigError

// Timed parameter change applied between integration steps. `action` is
// "set" (field := value) or "scale" (field *= value).
struct Event {
  double t{};
  std::string action;
  std::string field;
  double value{};
};

struct SimOptions {
  double t_end{1.0};
  double dt{1e-6};
  long decimate{100};   // keep every Nth sample in the output table
  bool monitor{true};   // track storage energy against the active equilibrium
  bool strict{false};   // escalate warnings to errors
};

// Second converter and coupling network for the two-converter model.
struct NetworkSection {
  LineParams line{0.5, 2.5e-5};
  double c_net{2e-7};
  double g_net{0.1};
  DcPid pid2{};
  double mu2{0.33};
  bool init_equilibrium{true};
};

struct SimConfig {
  ModelKind kind{ModelKind::SingleAb};
  CtrlKind ctrl{CtrlKind::Feedforward};
  ConverterParams conv{0.1, 1e-3, 0.1, 5e-4, 1e-5, 0.01};
  LoadParams load{};
  DcPid pid{};
  double v_dc_ref{1000.0};
  double r_ref{165.0};
  double omega0{100.0 * M_PI};
  double mu_fixed{0.33};  // modulation amplitude when ctrl = none
  PiPbcGains pipbc{};
  DroopGains droop{};
  NetworkSection net{};
  SimOptions sim{};
  std::vector<Event> events;

  double eta() const { return matching_eta(omega0, v_dc_ref); }
};

// INI-style config: [section] headers, key = value lines, # or ; comments,
// and one [[events]] block per timed change. Unknown sections or keys are
// hard errors.
SimConfig parse_config_text(const std::string& text);
SimConfig load_config_file(const std::string& path);

void validate_config(const SimConfig& cfg);  // throws ConfigError

// Parameter slot a timed event may write, nullptr if the name is unknown.
double* event_field(SimConfig& cfg, const std::string& field);

}  // namespace gfm
