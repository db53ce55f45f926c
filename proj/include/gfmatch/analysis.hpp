#pragma once

#include <complex>

#include "gfmatch/control.hpp"
#include "gfmatch/params.hpp"
#include "gfmatch/planar.hpp"

namespace gfm {

// Closed-loop operating point of a single converter in its rotating frame.
struct Equilibrium {
  double v_dc{};  // dc-link voltage
  double omega{}; // electrical frequency eta * v_dc
  DqVec i;        // filter current
  DqVec v;        // filter/load bus voltage
  double xi{};    // dc-loop integrator
  double nu{};    // amplitude-loop integrator
  double mu{};    // modulation amplitude
};

// Operating point with integral dc control: v_dc is pinned at v_dc_ref, the
// ac side follows from the planar network algebra, and the integrator soaks
// up whatever dc current the dispatch does not cover.
Equilibrium solve_equilibrium_pid(const ConverterParams& cp,
                                  const LoadParams& ld, const DcPid& pid,
                                  double v_dc_ref, double mu, double eta);

// Operating point with proportional-only dc control (k_i = 0): v_dc floats,
// and frequency floats with it. Solved by a fixed-point iteration that
// re-evaluates the network at the implied frequency; converges to the
// high-voltage branch.
Equilibrium solve_equilibrium_p(const ConverterParams& cp,
                                const LoadParams& ld, const DcPid& pid,
                                double v_dc_ref, double mu, double eta);

// Quadratic-rate certificate for local convergence around an equilibrium:
// the dissipation matrix stays positive definite as long as
//   eta^2 * ( L^2 |i*|^2 / (4R) + C^2 |v*|^2 / (4 (g + g_l)) ) < g_dc + k_p.
struct PassivityReport {
  bool passive{};
  double lhs{};
  double rhs{};
  double margin{};  // rhs - lhs
};

PassivityReport passivity_certificate(const ConverterParams& cp,
                                      double g_shunt_total, double k_p,
                                      const Equilibrium& eq, double eta);

// The full 5x5 dissipation matrix behind the certificate, row-major, state
// order (v_dc, i_d, i_q, v_d, v_q). Exposed so tests can cross-check the
// Schur-complement reduction against a dense eigenvalue solve.
void dissipation_matrix(const ConverterParams& cp, double g_shunt_total,
                        double k_p, const Equilibrium& eq, double eta,
                        double out[25]);

// System matrix of the (xi, i, v) error dynamics at fixed dc voltage,
// row-major 5x5, and its determinant in closed form:
// det = -k_i * |Z*Yt + I|^2.
void error_system_matrix(double k_i, double mu, PlanarOp z, PlanarOp yt,
                         double out[25]);
double error_system_det(double k_i, PlanarOp z, PlanarOp yt);

// Quadratic storage around an equilibrium, in the rotating frame.
// Level 1: electrical energy in c_dc, l, c.
// Level 2: adds the dc integrator and derivative-augmentation terms.
// Level 3: adds the amplitude-loop integrator term.
double storage_energy(const ConverterParams& cp, const DcPid& pid,
                      double kappa_i, const Equilibrium& eq, double v_dc,
                      DqVec i, DqVec v, double xi, double nu, int level);

// Modulation amplitudes that place the load-bus voltage magnitude at r_ref.
// The quadratic mu^2 - b*mu - 4*psi/v_dc_ref^2 = 0 has exactly one positive
// root iff psi > 0.
struct MuDesign {
  double psi{};
  double b{};
  double disc{};        // discriminant of the quadratic
  double root_lo{};
  double root_hi{};
  int n_real{};
  int n_positive{};
  bool unique_positive{};
  double mu{};          // selected (largest positive) root
};

// Root structure only, without feasibility enforcement: n_positive may be
// 0, 1 or 2 and mu is left at zero.
MuDesign amplitude_roots(const ConverterParams& cp, const LoadParams& ld,
                         double v_dc_ref, double r_ref, double eta);

// As above, but selects the largest positive root as mu and throws
// InfeasibleError when none exists.
MuDesign amplitude_feedforward(const ConverterParams& cp, const LoadParams& ld,
                               double v_dc_ref, double r_ref, double eta);

// Feedforward constants for the passivity-based amplitude loop: the
// feedforward amplitude and the quadrature current at the target point.
struct PbcDesign {
  double mu_ff{};
  double iq_star{};
};

PbcDesign design_pi_pbc(const ConverterParams& cp, const LoadParams& ld,
                        const DcPid& pid, double v_dc_ref, double r_ref,
                        double eta);

// Steady state of the amplitude droop loop against a conductance load:
// mu_ss = (1 - sqrt(1 - 4 a c)) / (2 a). Throws InfeasibleError when the
// droop feedback has no fixed point at this load.
struct DroopFixedPoint {
  double mu{};
  double amplitude{};
  double p_load{};
};

DroopFixedPoint droop_fixed_point(const ConverterParams& cp,
                                  const LoadParams& ld, const DroopGains& g,
                                  double v_dc_ref, double eta);

// dc operating voltages that deliver power p_x through an i0 - k*v_dc
// droop characteristic: the high/low roots of k*v^2 - i0*v + p_x = 0.
// p_max = i0^2 / (4k) is the nose point.
struct NosePoints {
  double v_high{};
  double v_low{};
  double p_max{};
};

NosePoints nose_points(double i0, double k_total, double p_x);

// Power injected by the dc side as a function of electrical frequency under
// proportional control, p(w) = -(k/eta^2) w^2 + (i0/eta) w, its slope, and
// the equivalent amplitude-droop slope dp/dr = (2 eta / mu) dp/dw.
double p_of_omega(double i0, double k_total, double eta, double omega);
double omega_sensitivity(double i0, double k_total, double eta, double omega);
double amplitude_droop_slope(double i0, double k_total, double eta,
                             double omega, double mu);

// Proportional power sharing: scaling both k_p and i_dc_ref by rho scales
// the converter's steady-state power by rho at any common dc voltage.
DcPid scale_sharing(const DcPid& base, double rho);

// Synchronized operating point of two converters tied to a common load bus
// through identical lines. Solved as a phasor nodal problem plus a Newton
// iteration on the shared dc voltage and the relative angle.
struct TwoConverterNetwork {
  ConverterParams conv;
  LineParams line;
  double c_net{};
  double g_net{};
  DcPid pid1, pid2;
  double mu1{}, mu2{};
  double v_dc_ref{};
  double eta{};
};

struct NetworkEquilibrium {
  double v_dc{};
  double delta{};  // angle of converter 1 relative to converter 2
  double omega{};
  std::complex<double> e1, e2;        // bridge EMF phasors
  std::complex<double> v1, v2, vnet;  // bus voltage phasors
  std::complex<double> i1, i2;        // filter current phasors
  std::complex<double> inet1, inet2;  // line current phasors
  double p1{}, p2{};                  // bridge powers
};

NetworkEquilibrium solve_network_equilibrium(const TwoConverterNetwork& net);

}  // namespace gfm
