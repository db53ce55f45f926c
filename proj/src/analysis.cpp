#include "gfmatch/analysis.hpp"

#include <cmath>
#include <cstdlib>

#include "gfmatch/errors.hpp"

namespace gfm {

namespace {

// Network seen from the bridge at frequency omega: series impedance,
// total shunt admittance (filter + load), and the closed planar map
// A = Z*Yt + I relating bridge EMF to bus voltage.
struct PlanarNetwork {
  PlanarOp z, yt, a;
};

PlanarNetwork planar_network(const ConverterParams& cp, const LoadParams& ld,
                             double omega) {
  PlanarNetwork n;
  n.z = series_impedance(cp, omega);
  n.yt = shunt_admittance(cp, omega) + load_admittance(ld);
  n.a = n.z * n.yt + identity_op();
  return n;
}

}  // namespace

Equilibrium solve_equilibrium_pid(const ConverterParams& cp,
                                  const LoadParams& ld, const DcPid& pid,
                                  double v_dc_ref, double mu, double eta) {
  if (!(pid.k_i > 0.0)) {
    throw ConfigError("integral dc gain must be positive to pin v_dc");
  }
  Equilibrium eq;
  eq.v_dc = v_dc_ref;
  eq.omega = eta * v_dc_ref;
  eq.mu = mu;
  const PlanarNetwork n = planar_network(cp, ld, eq.omega);
  const DqVec s{ld.s_d, ld.s_q};
  const DqVec drive = DqVec{0.0, 0.5 * mu * v_dc_ref} - n.z * s;
  eq.v = inverse(n.a) * drive;
  eq.i = n.yt * eq.v + s;
  // The command is i_dc_ref + k_p (v_ref - v_dc) + k_i xi, so at v_dc = v_ref
  // the integrator must supply whatever the reference current misses.
  eq.xi = (cp.g_dc * v_dc_ref + 0.5 * mu * eq.i.q - pid.i_dc_ref) / pid.k_i;
  eq.nu = 0.0;
  return eq;
}

Equilibrium solve_equilibrium_p(const ConverterParams& cp,
                                const LoadParams& ld, const DcPid& pid,
                                double v_dc_ref, double mu, double eta) {
  const double i0 = pid.i_dc_ref + pid.k_p * v_dc_ref;
  const DqVec s{ld.s_d, ld.s_q};
  double v_dc = v_dc_ref;
  DqVec v_unit, v_off;
  for (int iter = 0; iter < 200; ++iter) {
    const PlanarNetwork n = planar_network(cp, ld, eta * v_dc);
    const PlanarOp a_inv = inverse(n.a);
    // Bus voltage is affine in v_dc once the frequency is frozen:
    // v = v_dc * v_unit + v_off.
    v_unit = a_inv * DqVec{0.0, 0.5 * mu};
    v_off = a_inv * (DqVec{0.0, 0.0} - n.z * s);
    const double alpha = (n.yt * v_unit).q;
    const double beta = (n.yt * v_off + s).q;
    const double denom = cp.g_dc + pid.k_p + 0.5 * mu * alpha;
    if (!(denom > 0.0)) {
      throw InfeasibleError("proportional dc loop has no stable branch");
    }
    const double v_new = (i0 - 0.5 * mu * beta) / denom;
    if (!(v_new > 0.0) || !std::isfinite(v_new)) {
      throw InfeasibleError("proportional dc loop has no positive operating voltage");
    }
    if (std::abs(v_new - v_dc) < 1e-12 * std::max(1.0, std::abs(v_new))) {
      v_dc = v_new;
      break;
    }
    v_dc = v_new;
    if (iter == 199) {
      throw InfeasibleError("dc operating point iteration did not converge");
    }
  }
  Equilibrium eq;
  eq.v_dc = v_dc;
  eq.omega = eta * v_dc;
  eq.mu = mu;
  const PlanarNetwork n = planar_network(cp, ld, eq.omega);
  const PlanarOp a_inv = inverse(n.a);
  eq.v = a_inv * (DqVec{0.0, 0.5 * mu * v_dc} - n.z * s);
  eq.i = n.yt * eq.v + s;
  eq.xi = 0.0;
  eq.nu = 0.0;
  return eq;
}

PassivityReport passivity_certificate(const ConverterParams& cp,
                                      double g_shunt_total, double k_p,
                                      const Equilibrium& eq, double eta) {
  if (!(g_shunt_total > 0.0)) {
    throw ConfigError("certificate needs a positive total shunt conductance");
  }
  PassivityReport r;
  r.lhs = eta * eta *
          (cp.l * cp.l * norm2(eq.i) / (4.0 * cp.r) +
           cp.c * cp.c * norm2(eq.v) / (4.0 * g_shunt_total));
  r.rhs = cp.g_dc + k_p;
  r.margin = r.rhs - r.lhs;
  r.passive = r.lhs < r.rhs;
  return r;
}

void dissipation_matrix(const ConverterParams& cp, double g_shunt_total,
                        double k_p, const Equilibrium& eq, double eta,
                        double out[25]) {
  for (int k = 0; k < 25; ++k) out[k] = 0.0;
  auto at = [&](int r, int c) -> double& { return out[5 * r + c]; };
  at(0, 0) = cp.g_dc + k_p;
  // Cross coupling between the dc error and the ac errors, rotated 90 deg.
  const double li[2] = {-0.5 * eta * cp.l * eq.i.q, 0.5 * eta * cp.l * eq.i.d};
  const double cv[2] = {-0.5 * eta * cp.c * eq.v.q, 0.5 * eta * cp.c * eq.v.d};
  for (int k = 0; k < 2; ++k) {
    at(0, 1 + k) = li[k];
    at(1 + k, 0) = li[k];
    at(0, 3 + k) = cv[k];
    at(3 + k, 0) = cv[k];
  }
  at(1, 1) = cp.r;
  at(2, 2) = cp.r;
  at(3, 3) = g_shunt_total;
  at(4, 4) = g_shunt_total;
}

void error_system_matrix(double k_i, double mu, PlanarOp z, PlanarOp yt,
                         double out[25]) {
  for (int k = 0; k < 25; ++k) out[k] = 0.0;
  auto at = [&](int r, int c) -> double& { return out[5 * r + c]; };
  auto put_op = [&](int r, int c, PlanarOp o, double sign) {
    at(r, c) = sign * o.a;
    at(r, c + 1) = -sign * o.b;
    at(r + 1, c) = sign * o.b;
    at(r + 1, c + 1) = sign * o.a;
  };
  at(0, 0) = -k_i;
  at(0, 2) = -0.5 * mu;  // quadrature current feeds the dc balance
  put_op(1, 1, z, -1.0);
  put_op(1, 3, identity_op(), -1.0);
  put_op(3, 1, identity_op(), 1.0);
  put_op(3, 3, yt, -1.0);
}

double error_system_det(double k_i, PlanarOp z, PlanarOp yt) {
  return -k_i * norm2(z * yt + identity_op());
}

double storage_energy(const ConverterParams& cp, const DcPid& pid,
                      double kappa_i, const Equilibrium& eq, double v_dc,
                      DqVec i, DqVec v, double xi, double nu, int level) {
  const double dv_dc = v_dc - eq.v_dc;
  double e = 0.5 * cp.c_dc * dv_dc * dv_dc + 0.5 * cp.l * norm2(i - eq.i) +
             0.5 * cp.c * norm2(v - eq.v);
  if (level >= 2) {
    const double dxi = xi - eq.xi;
    e += 0.5 * pid.k_i * dxi * dxi + 0.5 * pid.k_d * dv_dc * dv_dc;
  }
  if (level >= 3) {
    const double dnu = nu - eq.nu;
    e += 0.5 * kappa_i * dnu * dnu;
  }
  return e;
}

MuDesign amplitude_roots(const ConverterParams& cp, const LoadParams& ld,
                         double v_dc_ref, double r_ref, double eta) {
  const double omega = eta * v_dc_ref;
  const PlanarNetwork n = planar_network(cp, ld, omega);
  const DqVec zs = n.z * DqVec{ld.s_d, ld.s_q};
  MuDesign d;
  d.psi = r_ref * r_ref * norm2(n.a) - norm2(zs);
  d.b = 4.0 * zs.q / v_dc_ref;
  const double half_b = 0.5 * d.b;
  d.disc = half_b * half_b + 4.0 * d.psi / (v_dc_ref * v_dc_ref);
  if (d.disc < 0.0) {
    d.n_real = 0;
  } else if (d.disc == 0.0) {
    d.n_real = 1;
    d.root_lo = d.root_hi = half_b;
  } else {
    d.n_real = 2;
    const double root = std::sqrt(d.disc);
    d.root_lo = half_b - root;
    d.root_hi = half_b + root;
  }
  d.n_positive = (d.n_real >= 1 && d.root_lo > 0.0) + (d.n_real == 2 && d.root_hi > 0.0);
  d.unique_positive = d.n_positive == 1;
  return d;
}

MuDesign amplitude_feedforward(const ConverterParams& cp, const LoadParams& ld,
                               double v_dc_ref, double r_ref, double eta) {
  MuDesign d = amplitude_roots(cp, ld, v_dc_ref, r_ref, eta);
  if (d.n_real == 0 || !(d.root_hi > 0.0)) {
    throw InfeasibleError("requested ac amplitude is not reachable at this load");
  }
  d.mu = d.root_hi;
  return d;
}

PbcDesign design_pi_pbc(const ConverterParams& cp, const LoadParams& ld,
                        const DcPid& pid, double v_dc_ref, double r_ref,
                        double eta) {
  const MuDesign d = amplitude_feedforward(cp, ld, v_dc_ref, r_ref, eta);
  const Equilibrium eq = solve_equilibrium_pid(cp, ld, pid, v_dc_ref, d.mu, eta);
  return {d.mu, eq.i.q};
}

DroopFixedPoint droop_fixed_point(const ConverterParams& cp,
                                  const LoadParams& ld, const DroopGains& g,
                                  double v_dc_ref, double eta) {
  if (ld.s_d != 0.0 || ld.s_q != 0.0) {
    throw ConfigError("droop fixed point is defined for shunt admittance loads");
  }
  const double omega = eta * v_dc_ref;
  const PlanarNetwork n = planar_network(cp, ld, omega);
  const double k = 0.5 * v_dc_ref / norm(n.a);  // bus volts per unit modulation
  const double a = g.d_v * ld.g_l * k * k;
  const double c = g.mu_ref - g.d_v * g.p_ref;
  DroopFixedPoint fp;
  if (std::abs(a) < 1e-30) {
    fp.mu = c;
  } else {
    const double disc = 1.0 - 4.0 * a * c;
    if (disc < 0.0) {
      throw InfeasibleError("droop loop has no fixed point at this load");
    }
    fp.mu = (1.0 - std::sqrt(disc)) / (2.0 * a);
  }
  if (!(fp.mu > 0.0)) {
    throw InfeasibleError("droop fixed point has a non-positive amplitude");
  }
  fp.amplitude = k * fp.mu;
  fp.p_load = ld.g_l * fp.amplitude * fp.amplitude;
  return fp;
}

NosePoints nose_points(double i0, double k_total, double p_x) {
  if (!(k_total > 0.0)) {
    throw ConfigError("total dc droop conductance must be positive");
  }
  NosePoints np;
  np.p_max = i0 * i0 / (4.0 * k_total);
  if (p_x > np.p_max) {
    throw InfeasibleError("requested power lies beyond the nose point");
  }
  const double root = std::sqrt(i0 * i0 - 4.0 * k_total * p_x);
  np.v_high = (i0 + root) / (2.0 * k_total);
  np.v_low = (i0 - root) / (2.0 * k_total);
  return np;
}

double p_of_omega(double i0, double k_total, double eta, double omega) {
  return -(k_total / (eta * eta)) * omega * omega + (i0 / eta) * omega;
}

double omega_sensitivity(double i0, double k_total, double eta, double omega) {
  return -2.0 * k_total * omega / (eta * eta) + i0 / eta;
}

double amplitude_droop_slope(double i0, double k_total, double eta,
                             double omega, double mu) {
  return (2.0 * eta / mu) * omega_sensitivity(i0, k_total, eta, omega);
}

DcPid scale_sharing(const DcPid& base, double rho) {
  if (!(rho > 0.0)) throw ConfigError("sharing ratio must be positive");
  return {base.i_dc_ref * rho, base.k_p * rho, base.k_i * rho, base.k_d * rho};
}

namespace {

using cd = std::complex<double>;

struct PhasorSolution {
  cd e1, e2, v1, v2, vnet, i1, i2, inet1, inet2;
  double p1, p2;
};

// Nodal solve of the three ac buses for fixed dc voltage, relative angle
// and frequency. Phasors live in the stationary plane (alpha + j beta), so
// Re(v * conj(i)) is the instantaneous power of the balanced solution.
PhasorSolution phasor_solve(const TwoConverterNetwork& net, double v_dc,
                            double delta, double omega) {
  const cd j{0.0, 1.0};
  const cd zs{net.conv.r, omega * net.conv.l};
  const cd zn{net.line.r_net, omega * net.line.l_net};
  const cd y{net.conv.g, omega * net.conv.c};
  const cd ynet{net.g_net, omega * net.c_net};
  PhasorSolution s;
  s.e1 = 0.5 * net.mu1 * v_dc * std::exp(j * (delta + M_PI / 2.0));
  s.e2 = 0.5 * net.mu2 * v_dc * std::exp(j * (M_PI / 2.0));

  cd m[3][4] = {
      {y + 1.0 / zs + 1.0 / zn, 0.0, -1.0 / zn, s.e1 / zs},
      {0.0, y + 1.0 / zs + 1.0 / zn, -1.0 / zn, s.e2 / zs},
      {-1.0 / zn, -1.0 / zn, ynet + 2.0 / zn, 0.0},
  };
  // Gaussian elimination with partial pivoting on the 3x3 complex system.
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    }
    if (std::abs(m[piv][col]) < 1e-300) {
      throw InfeasibleError("singular network admittance system");
    }
    if (piv != col) {
      for (int c = 0; c < 4; ++c) std::swap(m[piv][c], m[col][c]);
    }
    for (int r = col + 1; r < 3; ++r) {
      const cd f = m[r][col] / m[col][col];
      for (int c = col; c < 4; ++c) m[r][c] -= f * m[col][c];
    }
  }
  cd x[3];
  for (int r = 2; r >= 0; --r) {
    cd acc = m[r][3];
    for (int c = r + 1; c < 3; ++c) acc -= m[r][c] * x[c];
    x[r] = acc / m[r][r];
  }
  s.v1 = x[0];
  s.v2 = x[1];
  s.vnet = x[2];
  s.i1 = (s.e1 - s.v1) / zs;
  s.i2 = (s.e2 - s.v2) / zs;
  s.inet1 = (s.v1 - s.vnet) / zn;
  s.inet2 = (s.v2 - s.vnet) / zn;
  s.p1 = std::real(s.e1 * std::conj(s.i1));
  s.p2 = std::real(s.e2 * std::conj(s.i2));
  return s;
}

}  // namespace

NetworkEquilibrium solve_network_equilibrium(const TwoConverterNetwork& net) {
  if (net.pid1.k_i != 0.0 || net.pid2.k_i != 0.0) {
    throw ConfigError("network equilibrium assumes proportional-only dc control");
  }
  // Residuals: dc current balance of each converter at a common dc voltage.
  auto residual = [&](double v_dc, double delta, double* f) {
    const double omega = net.eta * v_dc;
    const PhasorSolution s = phasor_solve(net, v_dc, delta, omega);
    f[0] = net.pid1.i_dc_ref + net.pid1.k_p * (net.v_dc_ref - v_dc) -
           net.conv.g_dc * v_dc - s.p1 / v_dc;
    f[1] = net.pid2.i_dc_ref + net.pid2.k_p * (net.v_dc_ref - v_dc) -
           net.conv.g_dc * v_dc - s.p2 / v_dc;
  };

  double v_dc = 1.05 * net.v_dc_ref;
  double delta = 0.1;
  double f[2];
  bool converged = false;
  for (int iter = 0; iter < 100; ++iter) {
    residual(v_dc, delta, f);
    const double scale = std::max(
        {1.0, std::abs(net.pid1.i_dc_ref), std::abs(net.pid2.i_dc_ref)});
    if (std::abs(f[0]) < 1e-12 * scale && std::abs(f[1]) < 1e-12 * scale) {
      converged = true;
      break;
    }
    const double hv = 1e-7 * std::max(1.0, std::abs(v_dc));
    const double hd = 1e-8;
    double fv[2], fd[2];
    residual(v_dc + hv, delta, fv);
    residual(v_dc, delta + hd, fd);
    const double j00 = (fv[0] - f[0]) / hv, j01 = (fd[0] - f[0]) / hd;
    const double j10 = (fv[1] - f[1]) / hv, j11 = (fd[1] - f[1]) / hd;
    const double det = j00 * j11 - j01 * j10;
    if (!std::isfinite(det) || std::abs(det) < 1e-300) {
      throw InfeasibleError("network equilibrium Jacobian is singular");
    }
    const double dv = (-f[0] * j11 + f[1] * j01) / det;
    const double dd = (-j00 * f[1] + j10 * f[0]) / det;
    v_dc += dv;
    delta += dd;
    if (!(v_dc > 0.0) || !std::isfinite(v_dc) || !std::isfinite(delta) ||
        std::abs(delta) > M_PI) {
      throw InfeasibleError("no synchronized operating point found");
    }
  }
  if (!converged) {
    throw InfeasibleError("no synchronized operating point found");
  }

  NetworkEquilibrium eq;
  eq.v_dc = v_dc;
  eq.delta = delta;
  eq.omega = net.eta * v_dc;
  const PhasorSolution s = phasor_solve(net, v_dc, delta, eq.omega);
  eq.e1 = s.e1;
  eq.e2 = s.e2;
  eq.v1 = s.v1;
  eq.v2 = s.v2;
  eq.vnet = s.vnet;
  eq.i1 = s.i1;
  eq.i2 = s.i2;
  eq.inet1 = s.inet1;
  eq.inet2 = s.inet2;
  eq.p1 = s.p1;
  eq.p2 = s.p2;
  return eq;
}

}  // namespace gfm
