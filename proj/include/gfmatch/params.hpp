#pragma once

#include "gfmatch/errors.hpp"
#include "gfmatch/planar.hpp"

namespace gfm {

// Averaged two-level converter: dc link (g_dc, c_dc) behind a switching
// bridge, series RL output filter, shunt CG filter capacitor.
struct ConverterParams {
  double g_dc{};  // dc-side conductance [S]
  double c_dc{};  // dc-link capacitance [F]
  double r{};     // filter series resistance [Ohm]
  double l{};     // filter series inductance [H]
  double c{};     // filter shunt capacitance [F]
  double g{};     // filter shunt conductance [S]
};

inline void validate(const ConverterParams& p) {
  if (p.g_dc < 0.0) throw ConfigError("g_dc must be >= 0");
  if (!(p.c_dc > 0.0)) throw ConfigError("c_dc must be > 0");
  if (!(p.r > 0.0)) throw ConfigError("r must be > 0");
  if (!(p.l > 0.0)) throw ConfigError("l must be > 0");
  if (!(p.c > 0.0)) throw ConfigError("c must be > 0");
  if (!(p.g > 0.0)) throw ConfigError("g must be > 0");
}

// Shunt load at the filter capacitor: i_l = (g_l*I + b_l*J) v + s, where the
// constant current source s is specified in the converter rotating frame.
struct LoadParams {
  double g_l{};  // load conductance [S]
  double b_l{};  // load susceptance [S]
  double s_d{};  // current source, direct component [A]
  double s_q{};  // current source, quadrature component [A]
};

inline void validate(const LoadParams& p) {
  if (p.g_l < 0.0) throw ConfigError("g_l must be >= 0");
}

// Single-machine surrogate: swing dynamics plus a constant-excitation round
// rotor stator, feeding the same filter capacitor and load.
struct MachineParams {
  double m{};      // rotor inertia [kg m^2]
  double d{};      // rotor damping [N m s]
  double tau_m{};  // mechanical torque [N m]
  double lm_if{};  // excitation flux L_m * i_f [V s]
  double r_s{};    // stator resistance [Ohm]
  double l_s{};    // stator inductance [H]
  double c{};      // shunt capacitance [F]
  double g{};      // shunt conductance [S]
};

// The machine whose closed loop is state-for-state identical to a converter
// under the matching law theta' = eta*v_dc, m = mu*(-sin theta, cos theta):
// angle maps to angle, eta*v_dc maps to rotor speed.
inline MachineParams matched_machine(const ConverterParams& cp, double eta,
                                     double mu, double i_dc) {
  MachineParams mp;
  mp.m = cp.c_dc / (eta * eta);
  mp.d = cp.g_dc / (eta * eta);
  mp.tau_m = i_dc / eta;
  mp.lm_if = -mu / (2.0 * eta);
  mp.r_s = cp.r;
  mp.l_s = cp.l;
  mp.c = cp.c;
  mp.g = cp.g;
  return mp;
}

// Series line from each converter's filter bus to a common load bus.
struct LineParams {
  double r_net{};  // line resistance [Ohm]
  double l_net{};  // line inductance [H]
};

inline void validate(const LineParams& p) {
  if (!(p.r_net > 0.0)) throw ConfigError("r_net must be > 0");
  if (!(p.l_net > 0.0)) throw ConfigError("l_net must be > 0");
}

// Series impedance R + w*L*J and shunt admittance G + w*C*J of the filter
// at electrical frequency w.
inline PlanarOp series_impedance(const ConverterParams& p, double omega) {
  return {p.r, omega * p.l};
}

inline PlanarOp shunt_admittance(const ConverterParams& p, double omega) {
  return {p.g, omega * p.c};
}

inline PlanarOp load_admittance(const LoadParams& p) { return {p.g_l, p.b_l}; }

}  // namespace gfm
