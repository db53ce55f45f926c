#pragma once

#include "gfmatch/params.hpp"
#include "gfmatch/planar.hpp"

namespace gfm {

// Open-loop converter electrical dynamics, stationary frame.
// x = [v_dc, i_a, i_b, v_a, v_b]; inputs are the modulation vector m, the
// dc-side current injection i_dc and the current i_out drawn from the filter
// capacitor node. c_eff is the dc capacitance actually integrating v_dc
// (c_dc plus any derivative-feedback augmentation).
void converter_rhs(const ConverterParams& p, double c_eff, double i_dc,
                   AbVec m, AbVec i_out, const double* x, double* dx);

// Same converter expressed in a frame rotating at `omega`, where the
// modulation vector is (0, mu). x = [v_dc, i_d, i_q, v_d, v_q].
void converter_rhs_dq(const ConverterParams& p, double c_eff, double i_dc,
                      double mu, double omega, DqVec i_out, const double* x,
                      double* dx);

// Machine surrogate, stationary frame. x = [theta, omega, i_a, i_b, v_a, v_b].
void machine_rhs(const MachineParams& p, AbVec i_out, const double* x,
                 double* dx);

// Shunt load current at a filter bus. The constant current source (s_d, s_q)
// is defined in the rotating frame at angle theta.
AbVec load_current(const LoadParams& p, AbVec v, double theta);
DqVec load_current_dq(const LoadParams& p, DqVec v);

// Power delivered by the bridge to the ac side: (1/2) v_dc m . i.
inline double bridge_power(AbVec m, double v_dc, AbVec i) {
  return 0.5 * v_dc * dot(m, i);
}

inline double bridge_power_dq(double mu, double v_dc, DqVec i) {
  return 0.5 * v_dc * mu * i.q;
}

}  // namespace gfm
