#include "gfmatch/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "gfmatch/analysis.hpp"
#include "gfmatch/errors.hpp"
#include "gfmatch/plant.hpp"
#include "gfmatch/presets.hpp"
#include "gfmatch/sim.hpp"
#include "gfmatch/timeseries.hpp"

namespace gfm {

namespace {

std::string num(double x) {
  char b[40];
  std::snprintf(b, sizeof b, "%.6g", x);
  return b;
}

double last_value(const TimeSeries& ts, const std::string& col) {
  if (ts.nrows() == 0) throw InfeasibleError("empty time series");
  return ts.at(ts.nrows() - 1, ts.col_index(col));
}

// Mean of a per-row column ratio over the rows with t0 <= t <= t1.
double mean_ratio(const TimeSeries& ts, const std::string& num_col,
                  const std::string& den_col, double t0, double t1) {
  const size_t ct = ts.col_index("t");
  const size_t cn = ts.col_index(num_col);
  const size_t cd = ts.col_index(den_col);
  double acc = 0.0;
  long n = 0;
  for (size_t r = 0; r < ts.nrows(); ++r) {
    const double t = ts.at(r, ct);
    if (t < t0 || t > t1) continue;
    acc += ts.at(r, cn) / ts.at(r, cd);
    ++n;
  }
  if (n == 0) throw InfeasibleError("no samples in ratio window");
  return acc / static_cast<double>(n);
}

struct PresetRun {
  bool ok{};
  std::string err;
  SimResult res;
};

PresetRun run_checked(const SimConfig& cfg) {
  PresetRun r;
  try {
    r.res = run_simulation(cfg);
    r.ok = true;
  } catch (const std::exception& e) {
    r.err = e.what();
  }
  return r;
}

PresetRun run_checked(const std::string& name) {
  try {
    return run_checked(preset_config(name));
  } catch (const std::exception& e) {
    PresetRun r;
    r.err = e.what();
    return r;
  }
}

const char* kSingleNames[3] = {"single-pid-feedforward", "single-pid-pipbc",
                               "single-pid-droop"};
const char* kShortNames[3] = {"feedforward", "pi-pbc", "droop"};

// The machine surrogate and the fixed-dispatch converter must trace the
// same trajectory once rotor speed is read as eta * v_dc.
Check machine_equivalence() {
  Check c{"machine-equivalence", false, ""};
  try {
    const SimConfig mc = preset_config("matching-vs-sm");
    SimConfig cc = mc;
    cc.kind = ModelKind::SingleAb;
    const SimResult m = run_simulation(mc);
    const SimResult tw = run_simulation(cc);
    const char* cols[] = {"v_dc",    "theta",   "i_alpha",
                          "i_beta",  "v_alpha", "v_beta"};
    const size_t rows = std::min(m.ts.nrows(), tw.ts.nrows());
    double err = 0.0;
    for (const char* col : cols) {
      const size_t cm = m.ts.col_index(col);
      const size_t ct = tw.ts.col_index(col);
      for (size_t r = 0; r < rows; ++r) {
        err = std::max(err, std::abs(m.ts.at(r, cm) - tw.ts.at(r, ct)));
      }
    }
    const double wall = m.wall_seconds + tw.wall_seconds;
    c.pass = rows > 0 && m.ts.nrows() == tw.ts.nrows() && err < 1e-6 &&
             wall < 5.0;
    c.detail = "max mapped-state gap " + num(err) + " (tol 1e-6), wall " +
               num(wall) + " s (limit 5)";
  } catch (const std::exception& e) {
    c.detail = std::string("exception: ") + e.what();
  }
  return c;
}

// All three closed-loop presets must return v_dc (and with it the frequency)
// to the rated point after the load step.
Check dc_regulation(const PresetRun runs[3]) {
  Check c{"dc-regulation", false, ""};
  const double w0 = 100.0 * M_PI;
  bool ok = true;
  std::string d;
  for (int k = 0; k < 3; ++k) {
    if (!runs[k].ok) {
      ok = false;
      d += std::string(kShortNames[k]) + ": " + runs[k].err + "; ";
      continue;
    }
    const TimeSeries& ts = runs[k].res.ts;
    const double dv = std::abs(last_value(ts, "v_dc") - 1000.0);
    const double dw = std::abs(last_value(ts, "omega") - w0);
    const double wall = runs[k].res.wall_seconds;
    ok = ok && dv < 0.5 && dw < 0.01 && wall < 60.0;
    d += std::string(kShortNames[k]) + " dv " + num(dv) + " V, dw " + num(dw) +
         " rad/s, wall " + num(wall) + " s; ";
  }
  c.pass = ok;
  c.detail = d + "(tol 0.5 V, 0.01 rad/s, 60 s)";
  return c;
}

// Feedforward and the amplitude PI pin the bus voltage magnitude at the
// design radius; droop must sit on its published trade-off curve below it.
Check amplitude_tracking(const PresetRun runs[3]) {
  Check c{"amplitude-tracking", false, ""};
  try {
    bool ok = true;
    std::string d;
    for (int k = 0; k < 2; ++k) {
      if (!runs[k].ok) {
        ok = false;
        d += std::string(kShortNames[k]) + ": " + runs[k].err + "; ";
        continue;
      }
      const double amp = last_value(runs[k].res.ts, "v_ac_amplitude");
      const double da = std::abs(amp - 165.0);
      ok = ok && da < 0.2;
      d += std::string(kShortNames[k]) + " |amp-165| " + num(da) +
           " (tol 0.2); ";
    }
    if (!runs[2].ok) {
      ok = false;
      d += std::string("droop: ") + runs[2].err;
    } else {
      const TimeSeries& ts = runs[2].res.ts;
      const double mu = last_value(ts, "mu");
      const double pl = last_value(ts, "P_l");
      const double amp = last_value(ts, "v_ac_amplitude");
      const DroopGains g = preset_config("single-pid-droop").droop;
      const double law =
          std::abs(mu - clamp_modulation(droop_modulation(g, pl)));
      ok = ok && law <= 1e-6 && amp < 165.0;
      d += "droop law residual " + num(law) + " (tol 1e-6), amp " + num(amp) +
           " (< 165)";
    }
    c.pass = ok;
    c.detail = d;
  } catch (const std::exception& e) {
    c.detail = std::string("exception: ") + e.what();
  }
  return c;
}

// Two converters dispatched 3:1 must deliver power 3:1 after each network
// load step, measured as the window mean of the instantaneous ratio.
Check power_sharing() {
  Check c{"power-sharing", false, ""};
  try {
    const PresetRun net = run_checked("parallel-sharing");
    if (!net.ok) {
      c.detail = net.err;
      return c;
    }
    const double r1 = mean_ratio(net.res.ts, "P_x_1", "P_x_2", 0.65, 0.7);
    const double r2 = mean_ratio(net.res.ts, "P_x_1", "P_x_2", 1.15, 1.2);
    const auto in_band = [](double r) { return r > 2.94 && r < 3.06; };
    c.pass = in_band(r1) && in_band(r2);
    c.detail = "mean P1/P2 " + num(r1) + " on [0.65,0.7] and " + num(r2) +
               " on [1.15,1.2] (band [2.94,3.06]), wall " +
               num(net.res.wall_seconds) + " s";
  } catch (const std::exception& e) {
    c.detail = std::string("exception: ") + e.what();
  }
  return c;
}

// The storage energy around the active equilibrium must never rise beyond
// the per-step slack in any closed-loop preset.
Check energy_monotonicity(const PresetRun runs[3]) {
  Check c{"energy-monotonicity", false, ""};
  bool ok = true;
  std::string d;
  for (int k = 0; k < 3; ++k) {
    if (!runs[k].ok) {
      ok = false;
      d += std::string(kShortNames[k]) + ": " + runs[k].err + "; ";
      continue;
    }
    const long bad = runs[k].res.monitor_violations;
    const long steps = runs[k].res.monitor_steps;
    ok = ok && bad == 0 && steps > 0;
    d += std::string(kShortNames[k]) + " " + std::to_string(bad) + "/" +
         std::to_string(steps) + " rises; ";
  }
  c.pass = ok;
  c.detail = d + "(required: 0 rises, monitor armed)";
  return c;
}

// The amplitude feedforward must place the bus magnitude exactly at the
// requested radius, and its quadratic must have exactly one positive root
// precisely when psi > 0, across randomized loads.
Check feedforward_design() {
  Check c{"feedforward-design", false, ""};
  try {
    const SimConfig base;
    const double eta = base.eta();
    const DcPid pid{100.0, 1.0, 10.0, 0.0};
    const MuDesign d0 = amplitude_feedforward(base.conv, LoadParams{},
                                              base.v_dc_ref, base.r_ref, eta);
    const Equilibrium eq0 = solve_equilibrium_pid(
        base.conv, LoadParams{}, pid, base.v_dc_ref, d0.mu, eta);
    const double res0 = std::abs(norm(eq0.v) - base.r_ref);

    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> ug(0.0, 0.15);
    std::uniform_real_distribution<double> ub(-0.05, 0.05);
    std::uniform_real_distribution<double> us(-40.0, 40.0);
    std::uniform_real_distribution<double> ur(0.5, 20.0);
    int bad_rule = 0, bad_amp = 0, n0 = 0, n1 = 0, n2 = 0;
    for (int k = 0; k < 200; ++k) {
      const LoadParams ld{ug(rng), ub(rng), us(rng), us(rng)};
      const double r_ref = ur(rng);
      const MuDesign d =
          amplitude_roots(base.conv, ld, base.v_dc_ref, r_ref, eta);
      if ((d.psi > 0.0) != d.unique_positive) ++bad_rule;
      if (d.n_positive == 0) {
        ++n0;
      } else if (d.n_positive == 1) {
        ++n1;
      } else {
        ++n2;
      }
      if (d.n_real == 2 && d.root_hi > 0.0 && d.disc > 1e-8) {
        const Equilibrium eq = solve_equilibrium_pid(
            base.conv, ld, pid, base.v_dc_ref, d.root_hi, eta);
        if (std::abs(norm(eq.v) - r_ref) > 1e-8 * std::max(1.0, r_ref)) {
          ++bad_amp;
        }
      }
    }
    c.pass = res0 < 1e-9 && bad_rule == 0 && bad_amp == 0 && n0 > 0 && n2 > 0;
    c.detail = "base |amp - r_ref| " + num(res0) +
               " (tol 1e-9); 200 draws: sign-rule breaks " +
               std::to_string(bad_rule) + ", amplitude misses " +
               std::to_string(bad_amp) + ", root counts 0/1/2 = " +
               std::to_string(n0) + "/" + std::to_string(n1) + "/" +
               std::to_string(n2);
  } catch (const std::exception& e) {
    c.detail = std::string("exception: ") + e.what();
  }
  return c;
}

// The stationary-frame and rotating-frame models of the same preset must
// agree column by column.
Check frame_consistency(const PresetRun& ab) {
  Check c{"frame-consistency", false, ""};
  try {
    if (!ab.ok) {
      c.detail = ab.err;
      return c;
    }
    SimConfig cfg = preset_config("single-pid-feedforward");
    cfg.kind = ModelKind::SingleDq;
    const SimResult dq = run_simulation(cfg);
    const char* cols[] = {"v_dc",    "theta",   "i_d",  "i_q",
                          "v_d",     "v_q",     "i_alpha", "i_beta",
                          "v_alpha", "v_beta",  "mu",   "v_ac_amplitude"};
    const size_t rows = std::min(ab.res.ts.nrows(), dq.ts.nrows());
    double err = 0.0;
    for (const char* col : cols) {
      const size_t ca = ab.res.ts.col_index(col);
      const size_t cb = dq.ts.col_index(col);
      for (size_t r = 0; r < rows; ++r) {
        err = std::max(err, std::abs(ab.res.ts.at(r, ca) - dq.ts.at(r, cb)));
      }
    }
    c.pass = rows > 0 && ab.res.ts.nrows() == dq.ts.nrows() && err < 1e-6;
    c.detail = "max column gap " + num(err) + " over " + std::to_string(rows) +
               " samples (tol 1e-6)";
  } catch (const std::exception& e) {
    c.detail = std::string("exception: ") + e.what();
  }
  return c;
}

// Rerunning a preset must reproduce the output table byte for byte.
Check determinism(const PresetRun& first) {
  Check c{"determinism", false, ""};
  try {
    if (!first.ok) {
      c.detail = first.err;
      return c;
    }
    const SimResult again = run_simulation(preset_config("single-pid-droop"));
    const std::string a = csv_string(first.res.ts);
    const std::string b = csv_string(again.ts);
    c.pass = !a.empty() && a == b;
    c.detail = c.pass ? "two runs emitted identical CSV (" +
                            std::to_string(a.size()) + " bytes)"
                      : "CSV outputs differ between reruns";
  } catch (const std::exception& e) {
    c.detail = std::string("exception: ") + e.what();
  }
  return c;
}

}  // namespace

std::vector<Check> verify_acceptance() {
  PresetRun singles[3];
  for (int k = 0; k < 3; ++k) singles[k] = run_checked(kSingleNames[k]);

  std::vector<Check> out;
  out.push_back(machine_equivalence());
  out.push_back(dc_regulation(singles));
  out.push_back(amplitude_tracking(singles));
  out.push_back(power_sharing());
  out.push_back(energy_monotonicity(singles));
  out.push_back(feedforward_design());
  out.push_back(frame_consistency(singles[0]));
  out.push_back(determinism(singles[2]));
  return out;
}

std::vector<Check> verify_quick() {
  std::vector<Check> out;

  {
    Check c{"planar-algebra", false, ""};
    try {
      const PlanarOp z{0.1, 0.15708};
      const PlanarOp zi = inverse(z);
      const double e1 = std::abs(zi.a - 2.8839947933050163) +
                        std::abs(zi.b + 4.5301790213235190);
      const PlanarOp prod = z * zi;
      const double e2 = std::abs(prod.a - 1.0) + std::abs(prod.b);
      c.pass = e1 < 1e-12 && e2 < 1e-14;
      c.detail = "inverse gap " + num(e1) + ", z*inv(z) gap " + num(e2);
    } catch (const std::exception& e) {
      c.detail = e.what();
    }
    out.push_back(c);
  }

  {
    Check c{"frames", false, ""};
    try {
      const AbZero bal = clarke(1.0, -0.5, -0.5);
      const double e1 = std::abs(bal.ab.a - 1.224744871391589) +
                        std::abs(bal.ab.b) + std::abs(bal.zero);
      const AbZero com = clarke(1.0, 1.0, 1.0);
      const double e2 = std::abs(com.ab.a) + std::abs(com.ab.b) +
                        std::abs(com.zero - 1.7320508075688772);
      const DqVec pq = park(AbVec{1.0, 0.0}, M_PI / 2.0);
      const double e3 = std::abs(pq.d) + std::abs(pq.q + 1.0);
      const AbVec rt = inverse_park(park(AbVec{0.3, -0.7}, 1.234), 1.234);
      const double e4 = std::abs(rt.a - 0.3) + std::abs(rt.b + 0.7);
      c.pass = e1 < 1e-12 && e2 < 1e-12 && e3 < 1e-12 && e4 < 1e-12;
      c.detail = "balanced " + num(e1) + ", common " + num(e2) + ", quarter " +
                 num(e3) + ", round-trip " + num(e4);
    } catch (const std::exception& e) {
      c.detail = e.what();
    }
    out.push_back(c);
  }

  {
    Check c{"equilibrium-residual", false, ""};
    try {
      SimConfig b;
      b.load.g_l = 0.06;
      const double eta = b.eta();
      const DcPid pid{100.0, 1.0, 10.0, 0.0};
      const MuDesign d =
          amplitude_feedforward(b.conv, b.load, b.v_dc_ref, b.r_ref, eta);
      const Equilibrium eq =
          solve_equilibrium_pid(b.conv, b.load, pid, b.v_dc_ref, d.mu, eta);
      const double x[5] = {eq.v_dc, eq.i.d, eq.i.q, eq.v.d, eq.v.q};
      double dx[5];
      const double i_dc = dc_current_command(pid, b.v_dc_ref, eq.v_dc, eq.xi);
      converter_rhs_dq(b.conv, b.conv.c_dc, i_dc, eq.mu, eq.omega,
                       load_current_dq(b.load, eq.v), x, dx);
      double r = 0.0;
      for (double v : dx) r = std::max(r, std::abs(v));
      const double amp_err = std::abs(norm(eq.v) - b.r_ref);
      c.pass = r < 1e-8 && amp_err < 1e-9;
      c.detail = "max |dx| " + num(r) + " (tol 1e-8), |amp - r_ref| " +
                 num(amp_err) + " (tol 1e-9)";
    } catch (const std::exception& e) {
      c.detail = e.what();
    }
    out.push_back(c);
  }

  {
    Check c{"feedforward-base", false, ""};
    try {
      const SimConfig b;
      const MuDesign d = amplitude_feedforward(b.conv, LoadParams{},
                                               b.v_dc_ref, b.r_ref, b.eta());
      const double e_mu = std::abs(d.mu - 0.33016773748456435);
      const double e_map =
          std::abs(std::sqrt(d.psi) / b.r_ref - 1.0005082954077706);
      c.pass = e_mu < 1e-12 && e_map < 1e-12 && d.unique_positive;
      c.detail = "mu gap " + num(e_mu) + ", loop-map gap " + num(e_map) +
                 ", unique positive root: " +
                 (d.unique_positive ? "yes" : "no");
    } catch (const std::exception& e) {
      c.detail = e.what();
    }
    out.push_back(c);
  }

  {
    Check c{"passivity-base", false, ""};
    try {
      SimConfig b;
      b.load.g_l = 0.06;
      const double eta = b.eta();
      const DcPid pid{100.0, 1.0, 10.0, 0.0};
      const MuDesign d =
          amplitude_feedforward(b.conv, b.load, b.v_dc_ref, b.r_ref, eta);
      const Equilibrium eq =
          solve_equilibrium_pid(b.conv, b.load, pid, b.v_dc_ref, d.mu, eta);
      const PassivityReport pr = passivity_certificate(
          b.conv, b.conv.g + b.load.g_l, pid.k_p, eq, eta);
      c.pass = pr.passive && pr.margin > 0.0;
      c.detail = "lhs " + num(pr.lhs) + " < rhs " + num(pr.rhs) + ", margin " +
                 num(pr.margin);
    } catch (const std::exception& e) {
      c.detail = e.what();
    }
    out.push_back(c);
  }

  {
    Check c{"droop-fixed-point", false, ""};
    try {
      SimConfig b;
      b.load.g_l = 0.06;
      const DroopGains g{0.33, 1e-5, 1e4};
      const DroopFixedPoint fp =
          droop_fixed_point(b.conv, b.load, g, b.v_dc_ref, b.eta());
      const double e_mu = std::abs(fp.mu - 0.2384153392898495);
      const double e_amp = std::abs(fp.amplitude - 118.4296);
      c.pass = e_mu < 1e-12 && e_amp < 1e-3;
      c.detail = "mu gap " + num(e_mu) + ", amplitude gap " + num(e_amp);
    } catch (const std::exception& e) {
      c.detail = e.what();
    }
    out.push_back(c);
  }

  {
    Check c{"nose-curve", false, ""};
    try {
      const NosePoints np = nose_points(2100.0, 2.0, 0.0);
      const double e1 = std::abs(np.p_max - 551250.0);
      const SimConfig b;
      const double eta = b.eta();
      const double w0 = b.omega0;
      const double e2 =
          std::abs(omega_sensitivity(2100.0, 2.0, eta, w0) -
                   (-6047.887837492026));
      const double w_star = 2100.0 * eta / 4.0;
      const double e3 = std::abs(p_of_omega(2100.0, 2.0, eta, w_star) -
                                 551250.0);
      c.pass = e1 < 1e-9 && e2 < 1e-8 && e3 < 1e-4;
      c.detail = "p_max gap " + num(e1) + ", slope gap " + num(e2) +
                 ", crest gap " + num(e3);
    } catch (const std::exception& e) {
      c.detail = e.what();
    }
    out.push_back(c);
  }

  {
    Check c{"sharing-scale", false, ""};
    try {
      const DcPid base{100.0, 2.0, 0.0, 0.0};
      const DcPid big = scale_sharing(base, 3.0);
      const double e1 = std::abs(big.i_dc_ref - 300.0) +
                        std::abs(big.k_p - 6.0) + std::abs(big.k_i) +
                        std::abs(big.k_d);
      const SimConfig b;
      const double eta = b.eta();
      const double w = 0.97 * b.omega0;
      const double e2 =
          std::abs(p_of_omega(3.0 * 2100.0, 3.0 * 2.0, eta, w) -
                   3.0 * p_of_omega(2100.0, 2.0, eta, w));
      c.pass = e1 == 0.0 && e2 < 1e-6;
      c.detail = "gain scaling gap " + num(e1) + ", power scaling gap " +
                 num(e2);
    } catch (const std::exception& e) {
      c.detail = e.what();
    }
    out.push_back(c);
  }

  {
    Check c{"network-dispatch", false, ""};
    try {
      const SimConfig n = preset_config("parallel-sharing");
      const TwoConverterNetwork tn{n.conv,      n.net.line, n.net.c_net,
                                   n.net.g_net, n.pid,      n.net.pid2,
                                   n.mu_fixed,  n.net.mu2,  n.v_dc_ref,
                                   n.eta()};
      const NetworkEquilibrium eq = solve_network_equilibrium(tn);
      const double e = std::abs(eq.p1 / eq.p2 - 3.0);
      c.pass = e < 1e-9 && eq.v_dc > 1000.0 && eq.v_dc < 1100.0;
      c.detail = "P1/P2 gap " + num(e) + " (tol 1e-9), v_dc " + num(eq.v_dc) +
                 ", angle " + num(eq.delta) + " rad";
    } catch (const std::exception& e) {
      c.detail = e.what();
    }
    out.push_back(c);
  }

  return out;
}

}  // namespace gfm
