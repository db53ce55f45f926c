#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

#include "doctest.h"
#include "gfmatch/analysis.hpp"
#include "gfmatch/errors.hpp"

using namespace gfm;

namespace {

const ConverterParams kConv{0.1, 1e-3, 0.1, 5e-4, 1e-5, 0.01};
const double kEta = matching_eta(100.0 * M_PI, 1000.0);

// Independent steady-state solve of the ac branch/bus algebra:
//   Z i + v = (0, mu v_dc / 2),   -i + (Y + Yl) v = -s.
void eigen_equilibrium(const ConverterParams& cp, const LoadParams& ld,
                       double v_dc, double mu, double omega, DqVec* i_out,
                       DqVec* v_out) {
  const double wl = omega * cp.l, wc = omega * cp.c;
  const double g = cp.g + ld.g_l, b = wc + ld.b_l;
  Eigen::Matrix4d a = Eigen::Matrix4d::Zero();
  a(0, 0) = cp.r;
  a(0, 1) = -wl;
  a(0, 2) = 1.0;
  a(1, 0) = wl;
  a(1, 1) = cp.r;
  a(1, 3) = 1.0;
  a(2, 0) = -1.0;
  a(2, 2) = g;
  a(2, 3) = -b;
  a(3, 1) = -1.0;
  a(3, 2) = b;
  a(3, 3) = g;
  Eigen::Vector4d rhs;
  rhs << 0.0, 0.5 * mu * v_dc, -ld.s_d, -ld.s_q;
  const Eigen::Vector4d x = a.fullPivLu().solve(rhs);
  *i_out = {x(0), x(1)};
  *v_out = {x(2), x(3)};
}

}  // namespace

TEST_CASE("pinned-voltage equilibrium matches an independent linear solve") {
  std::mt19937 rng(47);
  std::uniform_real_distribution<double> ur(0.02, 0.5);
  std::uniform_real_distribution<double> ul(1e-4, 1e-3);
  std::uniform_real_distribution<double> uc(1e-6, 5e-5);
  std::uniform_real_distribution<double> ug(0.002, 0.05);
  std::uniform_real_distribution<double> ugl(0.0, 0.2);
  std::uniform_real_distribution<double> ubl(-0.05, 0.05);
  std::uniform_real_distribution<double> us(-40.0, 40.0);
  std::uniform_real_distribution<double> um(0.05, 0.95);
  std::uniform_real_distribution<double> uv(500.0, 1500.0);
  std::uniform_real_distribution<double> uki(1.0, 20.0);
  for (int k = 0; k < 200; ++k) {
    const ConverterParams cp{0.1, 1e-3, ur(rng), ul(rng), uc(rng), ug(rng)};
    const LoadParams ld{ugl(rng), ubl(rng), us(rng), us(rng)};
    const DcPid pid{100.0, 1.0, uki(rng), 0.0};
    const double mu = um(rng), v_ref = uv(rng);
    const Equilibrium eq =
        solve_equilibrium_pid(cp, ld, pid, v_ref, mu, kEta);
    DqVec i2, v2;
    eigen_equilibrium(cp, ld, v_ref, mu, kEta * v_ref, &i2, &v2);
    CHECK(eq.i.d == doctest::Approx(i2.d).epsilon(1e-9));
    CHECK(eq.i.q == doctest::Approx(i2.q).epsilon(1e-9));
    CHECK(eq.v.d == doctest::Approx(v2.d).epsilon(1e-9));
    CHECK(eq.v.q == doctest::Approx(v2.q).epsilon(1e-9));
    // integrator soaks up the dc mismatch exactly
    const double i_dc = dc_current_command(pid, v_ref, v_ref, eq.xi);
    CHECK(std::abs(i_dc - cp.g_dc * v_ref - 0.5 * mu * eq.i.q) < 1e-8);
  }
}

TEST_CASE("pinned-voltage equilibrium requires integral action") {
  const DcPid pid{100.0, 1.0, 0.0, 0.0};
  CHECK_THROWS_AS(
      solve_equilibrium_pid(kConv, LoadParams{}, pid, 1000.0, 0.33, kEta),
      ConfigError);
}

TEST_CASE("floating-voltage equilibrium balances the dc node") {
  std::mt19937 rng(53);
  std::uniform_real_distribution<double> ukp(0.5, 3.0);
  std::uniform_real_distribution<double> ui(50.0, 200.0);
  std::uniform_real_distribution<double> um(0.1, 0.5);
  std::uniform_real_distribution<double> ugl(0.01, 0.15);
  std::uniform_real_distribution<double> ubl(-0.02, 0.02);
  for (int k = 0; k < 100; ++k) {
    const LoadParams ld{ugl(rng), ubl(rng), 0.0, 0.0};
    const DcPid pid{ui(rng), ukp(rng), 0.0, 0.0};
    const double mu = um(rng);
    const Equilibrium eq =
        solve_equilibrium_p(kConv, ld, pid, 1000.0, mu, kEta);
    CHECK(eq.omega == doctest::Approx(kEta * eq.v_dc).epsilon(1e-15));
    DqVec i2, v2;
    eigen_equilibrium(kConv, ld, eq.v_dc, mu, eq.omega, &i2, &v2);
    CHECK(eq.i.d == doctest::Approx(i2.d).epsilon(1e-8));
    CHECK(eq.i.q == doctest::Approx(i2.q).epsilon(1e-8));
    CHECK(eq.v.d == doctest::Approx(v2.d).epsilon(1e-8));
    CHECK(eq.v.q == doctest::Approx(v2.q).epsilon(1e-8));
    const double i_dc = pid.i_dc_ref + pid.k_p * (1000.0 - eq.v_dc);
    const double res = i_dc - kConv.g_dc * eq.v_dc - 0.5 * mu * eq.i.q;
    CHECK(std::abs(res) < 1e-7 * std::max(1.0, std::abs(i_dc)));
  }
}

TEST_CASE("feedforward amplitude hits the radius exactly at no load") {
  const MuDesign d =
      amplitude_feedforward(kConv, LoadParams{}, 1000.0, 165.0, kEta);
  CHECK(d.mu == doctest::Approx(0.33016773748456435).epsilon(1e-14));
  CHECK(std::sqrt(d.psi) / 165.0 ==
        doctest::Approx(1.0005082954077706).epsilon(1e-14));
  CHECK(d.unique_positive);
  const DcPid pid{100.0, 1.0, 10.0, 0.0};
  const Equilibrium eq =
      solve_equilibrium_pid(kConv, LoadParams{}, pid, 1000.0, d.mu, kEta);
  CHECK(std::abs(norm(eq.v) - 165.0) < 1e-9);
}

TEST_CASE("feedforward roots place the bus amplitude at the radius") {
  std::mt19937 rng(59);
  std::uniform_real_distribution<double> ugl(0.0, 0.15);
  std::uniform_real_distribution<double> ubl(-0.05, 0.05);
  std::uniform_real_distribution<double> us(-40.0, 40.0);
  std::uniform_real_distribution<double> ur(0.5, 20.0);
  const DcPid pid{100.0, 1.0, 10.0, 0.0};
  int n0 = 0, n1 = 0, n2 = 0;
  for (int k = 0; k < 500; ++k) {
    const LoadParams ld{ugl(rng), ubl(rng), us(rng), us(rng)};
    const double r_ref = ur(rng);
    const MuDesign d = amplitude_roots(kConv, ld, 1000.0, r_ref, kEta);
    // exactly one positive root precisely when psi is positive
    CHECK((d.psi > 0.0) == d.unique_positive);
    if (d.n_positive == 0) ++n0;
    if (d.n_positive == 1) ++n1;
    if (d.n_positive == 2) ++n2;
    if (d.n_real < 2 || d.disc < 1e-8) continue;
    for (const double root : {d.root_lo, d.root_hi}) {
      if (!(root > 0.0)) continue;
      const Equilibrium eq =
          solve_equilibrium_pid(kConv, ld, pid, 1000.0, root, kEta);
      CHECK(std::abs(norm(eq.v) - r_ref) < 1e-7 * std::max(1.0, r_ref));
    }
  }
  // the sweep must exercise every branch, including the two-positive-root
  // regime that exists below psi = 0
  CHECK(n0 > 0);
  CHECK(n1 > 0);
  CHECK(n2 > 0);
}

TEST_CASE("unreachable amplitude raises an infeasibility error") {
  // a strong counter-phase source makes a tiny radius unreachable
  const LoadParams ld{0.0, 0.0, 40.0, 40.0};
  bool threw = false;
  try {
    amplitude_feedforward(kConv, ld, 1000.0, 1e-4, kEta);
  } catch (const InfeasibleError&) {
    threw = true;
  }
  const MuDesign d = amplitude_roots(kConv, ld, 1000.0, 1e-4, kEta);
  // the throw must happen exactly when no positive root exists
  CHECK(threw == (d.n_real == 0 || !(d.root_hi > 0.0)));
}

TEST_CASE("amplitude-loop design pins the quadrature current both ways") {
  const LoadParams ld{0.06, 0.0, 0.0, 0.0};
  const DcPid pid{100.0, 1.0, 10.0, 0.0};
  const PbcDesign d = design_pi_pbc(kConv, ld, pid, 1000.0, 165.0, kEta);
  DqVec i2, v2;
  eigen_equilibrium(kConv, ld, 1000.0, d.mu_ff, kEta * 1000.0, &i2, &v2);
  CHECK(d.iq_star == doctest::Approx(i2.q).epsilon(1e-10));
  CHECK(std::hypot(v2.d, v2.q) == doctest::Approx(165.0).epsilon(1e-10));
}

TEST_CASE("droop fixed point reproduces the frozen operating points") {
  const DroopGains g{0.33, 1e-5, 1e4};
  LoadParams ld{0.06, 0.0, 0.0, 0.0};
  const DroopFixedPoint lo = droop_fixed_point(kConv, ld, g, 1000.0, kEta);
  CHECK(lo.mu == doctest::Approx(0.2384153392898495).epsilon(1e-13));
  CHECK(lo.amplitude == doctest::Approx(118.4296).epsilon(1e-5));
  ld.g_l = 0.093;
  const DroopFixedPoint hi = droop_fixed_point(kConv, ld, g, 1000.0, kEta);
  CHECK(hi.mu == doctest::Approx(0.24351731614237904).epsilon(1e-13));
  CHECK(hi.amplitude == doctest::Approx(120.560144907811).epsilon(1e-11));
  CHECK(hi.p_load ==
        doctest::Approx(ld.g_l * hi.amplitude * hi.amplitude).epsilon(1e-13));
  // the fixed point sits exactly on the droop law
  CHECK(hi.mu == doctest::Approx(droop_modulation(g, hi.p_load)).epsilon(1e-12));
}

TEST_CASE("droop fixed point rejects current-source loads and steep gains") {
  const DroopGains g{0.33, 1e-5, 1e4};
  CHECK_THROWS_AS(droop_fixed_point(kConv, LoadParams{0.06, 0.0, 5.0, 0.0}, g,
                                    1000.0, kEta),
                  ConfigError);
  const DroopGains steep{0.33, 1e-3, 0.0};
  CHECK_THROWS_AS(droop_fixed_point(kConv, LoadParams{0.06, 0.0, 0.0, 0.0},
                                    steep, 1000.0, kEta),
                  InfeasibleError);
}

TEST_CASE("scalar certificate equals positive definiteness of the "
          "dissipation matrix") {
  std::mt19937 rng(61);
  std::uniform_real_distribution<double> ux(-3000.0, 3000.0);
  std::uniform_real_distribution<double> ukp(0.0, 1.0);
  std::uniform_real_distribution<double> ugt(0.01, 0.3);
  int n_pass = 0, n_fail = 0;
  for (int k = 0; k < 500; ++k) {
    Equilibrium eq;
    eq.i = {ux(rng), ux(rng)};
    eq.v = {ux(rng), ux(rng)};
    const double g_tot = ugt(rng), k_p = ukp(rng);
    const PassivityReport pr =
        passivity_certificate(kConv, g_tot, k_p, eq, kEta);
    double q[25];
    dissipation_matrix(kConv, g_tot, k_p, eq, kEta, q);
    const Eigen::Map<Eigen::Matrix<double, 5, 5, Eigen::RowMajor>> m(q);
    CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
    using Mat5 = Eigen::Matrix<double, 5, 5>;
    const Eigen::SelfAdjointEigenSolver<Mat5> es{Mat5(m)};
    const double min_eig = es.eigenvalues().minCoeff();
    CHECK(pr.passive == (min_eig > 0.0));
    (pr.passive ? n_pass : n_fail) += 1;
  }
  CHECK(n_pass > 10);
  CHECK(n_fail > 10);
}

TEST_CASE("error-system determinant has the closed planar form") {
  std::mt19937 rng(67);
  std::uniform_real_distribution<double> uki(0.1, 20.0);
  std::uniform_real_distribution<double> um(0.0, 1.0);
  std::uniform_real_distribution<double> ur(0.01, 0.5);
  std::uniform_real_distribution<double> uxx(-0.3, 0.3);
  for (int k = 0; k < 200; ++k) {
    const double k_i = uki(rng), mu = um(rng);
    const PlanarOp z{ur(rng), uxx(rng)};
    const PlanarOp yt{ur(rng), uxx(rng)};
    double a[25];
    error_system_matrix(k_i, mu, z, yt, a);
    const Eigen::Map<Eigen::Matrix<double, 5, 5, Eigen::RowMajor>> m(a);
    const double det_ref = Eigen::Matrix<double, 5, 5>(m).fullPivLu().determinant();
    const double det = error_system_det(k_i, z, yt);
    CHECK(det == doctest::Approx(det_ref).epsilon(1e-10));
    // the modulation amplitude must not enter the determinant
    double a2[25];
    error_system_matrix(k_i, mu * 0.5 + 0.01, z, yt, a2);
    const Eigen::Map<Eigen::Matrix<double, 5, 5, Eigen::RowMajor>> m2(a2);
    CHECK(Eigen::Matrix<double, 5, 5>(m2).fullPivLu().determinant() ==
          doctest::Approx(det_ref).epsilon(1e-10));
  }
}

TEST_CASE("storage energy vanishes only at the equilibrium") {
  const DcPid pid{100.0, 1.0, 10.0, 2.0};
  const LoadParams ld{0.06, 0.0, 0.0, 0.0};
  const Equilibrium eq =
      solve_equilibrium_pid(kConv, ld, pid, 1000.0, 0.33, kEta);
  for (int level = 1; level <= 3; ++level) {
    CHECK(storage_energy(kConv, pid, 5.0, eq, eq.v_dc, eq.i, eq.v, eq.xi,
                         eq.nu, level) == 0.0);
  }
  const double v1 = storage_energy(kConv, pid, 5.0, eq, eq.v_dc + 1.0,
                                   eq.i + DqVec{1.0, -2.0},
                                   eq.v + DqVec{-3.0, 4.0}, eq.xi + 0.5,
                                   eq.nu + 0.25, 1);
  const double v2 = storage_energy(kConv, pid, 5.0, eq, eq.v_dc + 1.0,
                                   eq.i + DqVec{1.0, -2.0},
                                   eq.v + DqVec{-3.0, 4.0}, eq.xi + 0.5,
                                   eq.nu + 0.25, 2);
  const double v3 = storage_energy(kConv, pid, 5.0, eq, eq.v_dc + 1.0,
                                   eq.i + DqVec{1.0, -2.0},
                                   eq.v + DqVec{-3.0, 4.0}, eq.xi + 0.5,
                                   eq.nu + 0.25, 3);
  CHECK(v1 > 0.0);
  CHECK(v2 > v1);
  CHECK(v3 > v2);
}

TEST_CASE("nose point and frequency sensitivity of the dc power curve") {
  const NosePoints tip = nose_points(2100.0, 2.0, 0.0);
  CHECK(tip.p_max == 551250.0);
  CHECK(tip.v_high == doctest::Approx(1050.0).epsilon(1e-14));
  CHECK(tip.v_low == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  const NosePoints at_tip = nose_points(2100.0, 2.0, 551250.0);
  CHECK(at_tip.v_high == doctest::Approx(525.0).epsilon(1e-9));
  CHECK(at_tip.v_low == doctest::Approx(525.0).epsilon(1e-9));
  CHECK_THROWS_AS(nose_points(2100.0, 2.0, 551251.0), InfeasibleError);

  const double w0 = 100.0 * M_PI;
  CHECK(omega_sensitivity(2100.0, 2.0, kEta, w0) ==
        doctest::Approx(-6047.887837492026).epsilon(1e-12));
  // finite-difference cross-check of the slope
  const double h = 1e-3;
  const double fd = (p_of_omega(2100.0, 2.0, kEta, w0 + h) -
                     p_of_omega(2100.0, 2.0, kEta, w0 - h)) /
                    (2.0 * h);
  CHECK(fd == doctest::Approx(omega_sensitivity(2100.0, 2.0, kEta, w0))
                  .epsilon(1e-8));
  // radius slope is the frequency slope rescaled by 2 eta / mu
  CHECK(amplitude_droop_slope(2100.0, 2.0, kEta, w0, 0.33) ==
        doctest::Approx(2.0 * kEta / 0.33 *
                        omega_sensitivity(2100.0, 2.0, kEta, w0))
            .epsilon(1e-14));
  // p(omega) evaluated on the matching line equals v (i0 - k v)
  std::mt19937 rng(71);
  std::uniform_real_distribution<double> uv(10.0, 1049.0);
  for (int k = 0; k < 100; ++k) {
    const double v = uv(rng);
    CHECK(p_of_omega(2100.0, 2.0, kEta, kEta * v) ==
          doctest::Approx(v * (2100.0 - 2.0 * v)).epsilon(1e-10));
  }
}

TEST_CASE("dc gain scaling scales the whole power curve") {
  const DcPid base{100.0, 2.0, 0.0, 0.0};
  const DcPid big = scale_sharing(base, 3.0);
  CHECK(big.i_dc_ref == 300.0);
  CHECK(big.k_p == 6.0);
  CHECK(big.k_i == 0.0);
  CHECK(big.k_d == 0.0);
  CHECK_THROWS_AS(scale_sharing(base, 0.0), ConfigError);
  const double w = 0.98 * 100.0 * M_PI;
  CHECK(p_of_omega(3.0 * 2100.0, 3.0 * 2.0, kEta, w) ==
        doctest::Approx(3.0 * p_of_omega(2100.0, 2.0, kEta, w))
            .epsilon(1e-13));
}

TEST_CASE("two dispatched converters synchronize at a 3:1 power split") {
  const ConverterParams conv{0.0, 1e-3, 0.1, 5e-4, 1e-5, 0.01};
  const TwoConverterNetwork tn{conv,
                               LineParams{0.5, 2.5e-5},
                               2e-7,
                               0.1,
                               DcPid{100.0, 2.0, 0.0, 0.0},
                               DcPid{100.0 / 3.0, 2.0 / 3.0, 0.0, 0.0},
                               0.33,
                               0.33,
                               1000.0,
                               kEta};
  const NetworkEquilibrium eq = solve_network_equilibrium(tn);
  CHECK(std::abs(eq.p1 / eq.p2 - 3.0) < 1e-9);
  CHECK(eq.v_dc == doctest::Approx(1048.569).epsilon(1e-4));
  CHECK(eq.delta == doctest::Approx(0.1498).epsilon(1e-2));
  CHECK(eq.omega == doctest::Approx(kEta * eq.v_dc).epsilon(1e-15));

  using cd = std::complex<double>;
  const cd zs{conv.r, eq.omega * conv.l};
  const cd zn{tn.line.r_net, eq.omega * tn.line.l_net};
  const cd y{conv.g, eq.omega * conv.c};
  const cd ynet{tn.g_net, eq.omega * tn.c_net};
  // branch laws
  CHECK(std::abs(eq.i1 - (eq.e1 - eq.v1) / zs) < 1e-9);
  CHECK(std::abs(eq.i2 - (eq.e2 - eq.v2) / zs) < 1e-9);
  CHECK(std::abs(eq.inet1 - (eq.v1 - eq.vnet) / zn) < 1e-9);
  CHECK(std::abs(eq.inet2 - (eq.v2 - eq.vnet) / zn) < 1e-9);
  // nodal balances at the two filter buses and the load bus
  CHECK(std::abs(eq.i1 - y * eq.v1 - eq.inet1) < 1e-9);
  CHECK(std::abs(eq.i2 - y * eq.v2 - eq.inet2) < 1e-9);
  CHECK(std::abs(ynet * eq.vnet - eq.inet1 - eq.inet2) < 1e-9);
  // dc balance of each converter at the common voltage
  const double idc1 = tn.pid1.i_dc_ref + tn.pid1.k_p * (1000.0 - eq.v_dc);
  const double idc2 = tn.pid2.i_dc_ref + tn.pid2.k_p * (1000.0 - eq.v_dc);
  CHECK(std::abs(idc1 - eq.p1 / eq.v_dc) < 1e-7 * idc1);
  CHECK(std::abs(idc2 - eq.p2 / eq.v_dc) < 1e-7 * idc2);
}

TEST_CASE("network equilibrium rejects integral dc control") {
  TwoConverterNetwork tn{kConv,
                         LineParams{0.5, 2.5e-5},
                         2e-7,
                         0.1,
                         DcPid{100.0, 2.0, 1.0, 0.0},
                         DcPid{100.0 / 3.0, 2.0 / 3.0, 0.0, 0.0},
                         0.33,
                         0.33,
                         1000.0,
                         kEta};
  CHECK_THROWS_AS(solve_network_equilibrium(tn), ConfigError);
}
