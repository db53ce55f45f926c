#pragma once

#include <algorithm>
#include <cmath>

#include "gfmatch/planar.hpp"

namespace gfm {

// Frequency law: the converter angle integrates eta * v_dc, so the dc-link
// voltage plays the role of rotor speed. eta = omega0 / v_dc_ref places the
// rated dc voltage at the rated frequency.
inline double matching_eta(double omega0, double v_dc_ref) {
  return omega0 / v_dc_ref;
}

// Modulation vector of amplitude mu at angle theta (+90 deg so that the
// quadrature axis carries the drive).
inline AbVec matching_modulation(double theta, double mu) {
  return {-mu * std::sin(theta), mu * std::cos(theta)};
}

// dc-side current source command: proportional-integral around v_dc_ref on
// top of a constant dispatch i_dc_ref. Derivative action is realized
// exactly by augmenting the dc capacitance with k_d, never by numerical
// differentiation.
struct DcPid {
  double i_dc_ref{};
  double k_p{};
  double k_i{};
  double k_d{};
};

inline double dc_current_command(const DcPid& g, double v_dc_ref, double v_dc,
                                 double xi) {
  return g.i_dc_ref + g.k_p * (v_dc_ref - v_dc) + g.k_i * xi;
}

// Integrator state for the dc PI loop: xi' = v_dc_ref - v_dc.
inline double dc_integrator_rate(double v_dc_ref, double v_dc) {
  return v_dc_ref - v_dc;
}

// Passivity-based amplitude loop. The regulated output couples the
// quadrature current with the dc voltage; it vanishes at the target
// operating point (i_q = iq_star, v_dc = v_dc_ref) and its integral nu
// supplies the trim on top of the feedforward amplitude.
struct PiPbcGains {
  double kappa_p{};
  double kappa_i{};
};

inline double pbc_output(double i_q, double v_dc, double v_dc_ref,
                         double iq_star) {
  return i_q * v_dc_ref - iq_star * v_dc;
}

inline double pbc_modulation(double mu_ff, const PiPbcGains& g, double y,
                             double nu) {
  return mu_ff - g.kappa_p * y - g.kappa_i * nu;
}

// Amplitude droop: trade modulation amplitude against measured load power.
struct DroopGains {
  double mu_ref{};
  double d_v{};
  double p_ref{};
};

inline double droop_modulation(const DroopGains& g, double p_load) {
  return g.mu_ref + g.d_v * (p_load - g.p_ref);
}

// Physical duty-ratio range of the averaged bridge.
inline double clamp_modulation(double mu) {
  return std::clamp(mu, 0.0, 1.0);
}

}  // namespace gfm
