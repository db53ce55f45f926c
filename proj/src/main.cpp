#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "gfmatch/analysis.hpp"
#include "gfmatch/config.hpp"
#include "gfmatch/errors.hpp"
#include "gfmatch/plant.hpp"
#include "gfmatch/presets.hpp"
#include "gfmatch/sim.hpp"
#include "gfmatch/timeseries.hpp"
#include "gfmatch/verify.hpp"

namespace {

gfm::SimConfig load_input(const std::string& preset, const std::string& file) {
  if (!preset.empty() && !file.empty()) {
    throw gfm::ConfigError("give either --preset or --config, not both");
  }
  if (!preset.empty()) return gfm::preset_config(preset);
  if (!file.empty()) return gfm::load_config_file(file);
  throw gfm::ConfigError("one of --preset or --config is required");
}

void print_kv(const char* key, double value) {
  std::printf("%s = %.17g\n", key, value);
}

// Modulation amplitude the configured controller settles at.
double design_mu(const gfm::SimConfig& c) {
  switch (c.ctrl) {
    case gfm::CtrlKind::None:
      return c.mu_fixed;
    case gfm::CtrlKind::Feedforward:
    case gfm::CtrlKind::PiPbc:
      return gfm::amplitude_feedforward(c.conv, c.load, c.v_dc_ref, c.r_ref,
                                        c.eta())
          .mu;
    case gfm::CtrlKind::Droop:
      return gfm::droop_fixed_point(c.conv, c.load, c.droop, c.v_dc_ref,
                                    c.eta())
          .mu;
  }
  return c.mu_fixed;
}

gfm::Equilibrium design_equilibrium(const gfm::SimConfig& c) {
  const double mu = design_mu(c);
  if (c.pid.k_i > 0.0) {
    return gfm::solve_equilibrium_pid(c.conv, c.load, c.pid, c.v_dc_ref, mu,
                                      c.eta());
  }
  return gfm::solve_equilibrium_p(c.conv, c.load, c.pid, c.v_dc_ref, mu,
                                  c.eta());
}

int run_cli(int argc, char** argv) {
  CLI::App app{"grid-forming dc/ac converter simulation and analysis"};
  app.require_subcommand(1);

  std::string preset, config_file, out_file;
  double t_end = -1.0, dt = -1.0;
  long decimate = -1;
  bool no_monitor = false, strict = false;

  const auto add_input = [&](CLI::App* s) {
    s->add_option("--preset", preset, "named study case (see `presets`)");
    s->add_option("--config", config_file, "INI config file");
  };

  CLI::App* sim =
      app.add_subcommand("simulate", "integrate a model and emit CSV");
  add_input(sim);
  sim->add_option("--out", out_file, "CSV output path (default: stdout)");
  sim->add_option("--t-end", t_end, "override the simulated span [s]");
  sim->add_option("--dt", dt, "override the integration step [s]");
  sim->add_option("--decimate", decimate, "override the output decimation");
  sim->add_flag("--no-monitor", no_monitor,
                "disable the storage-energy monitor");
  sim->add_flag("--strict", strict, "escalate warnings to errors");

  CLI::App* an =
      app.add_subcommand("analyze", "closed-form operating-point analysis");
  an->require_subcommand(1);
  CLI::App* an_eq = an->add_subcommand(
      "equilibrium", "operating point of the configured loop");
  add_input(an_eq);
  CLI::App* an_ff =
      an->add_subcommand("feedforward", "amplitude feedforward design");
  add_input(an_ff);
  CLI::App* an_pass = an->add_subcommand(
      "passivity", "dissipation certificate at the operating point");
  add_input(an_pass);
  CLI::App* an_droop = an->add_subcommand("droop", "droop-loop fixed point");
  add_input(an_droop);
  CLI::App* an_share = an->add_subcommand(
      "sharing", "synchronized dispatch of the two-converter network");
  add_input(an_share);
  double i0 = 0.0, k_tot = 0.0, p_x = 0.0, omega_q = 100.0 * M_PI,
         mu_q = 0.33;
  CLI::App* an_nose =
      an->add_subcommand("nose", "dc power-transfer limits of a droop source");
  an_nose->add_option("--i0", i0, "short-circuit dc dispatch [A]")->required();
  an_nose->add_option("--k", k_tot, "total dc droop conductance [S]")
      ->required();
  an_nose->add_option("--p", p_x, "transferred power [W]");
  an_nose->add_option("--omega", omega_q,
                      "frequency at which to evaluate the slopes [rad/s]");
  an_nose->add_option("--mu", mu_q,
                      "modulation amplitude for the radius slope");

  std::string suite = "quick";
  CLI::App* ver = app.add_subcommand("verify", "run the self-check suites");
  ver->add_option("--suite", suite, "quick or acceptance")
      ->check(CLI::IsMember({"quick", "acceptance"}));

  CLI::App* pres = app.add_subcommand("presets", "list the named study cases");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Keep --help/--version at exit 0; fold usage mistakes into the same
    // exit code as config errors so callers see one stable "bad input" code.
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*pres) {
    for (const std::string& n : gfm::preset_names()) std::printf("%s\n", n.c_str());
    return 0;
  }

  if (*sim) {
    gfm::SimConfig cfg = load_input(preset, config_file);
    if (t_end > 0.0) cfg.sim.t_end = t_end;
    if (dt > 0.0) cfg.sim.dt = dt;
    if (decimate > 0) cfg.sim.decimate = decimate;
    if (no_monitor) cfg.sim.monitor = false;
    if (strict) cfg.sim.strict = true;
    const gfm::SimResult r = gfm::run_simulation(cfg);
    for (const std::string& w : r.warnings) {
      std::fprintf(stderr, "warning: %s\n", w.c_str());
    }
    if (out_file.empty()) {
      gfm::write_csv(r.ts, std::cout);
    } else {
      gfm::write_csv_file(r.ts, out_file);
    }
    std::fprintf(stderr,
                 "rows = %zu, wall = %.3f s, energy rises = %ld over %ld "
                 "monitored steps\n",
                 r.ts.nrows(), r.wall_seconds, r.monitor_violations,
                 r.monitor_steps);
    return 0;
  }

  if (*an_eq) {
    const gfm::SimConfig cfg = load_input(preset, config_file);
    const gfm::Equilibrium eq = design_equilibrium(cfg);
    print_kv("mu", eq.mu);
    print_kv("v_dc", eq.v_dc);
    print_kv("omega", eq.omega);
    print_kv("i_d", eq.i.d);
    print_kv("i_q", eq.i.q);
    print_kv("v_d", eq.v.d);
    print_kv("v_q", eq.v.q);
    print_kv("xi", eq.xi);
    print_kv("v_ac_amplitude", gfm::norm(eq.v));
    print_kv("p_x", gfm::bridge_power_dq(eq.mu, eq.v_dc, eq.i));
    return 0;
  }

  if (*an_ff) {
    const gfm::SimConfig cfg = load_input(preset, config_file);
    const gfm::MuDesign d = gfm::amplitude_roots(cfg.conv, cfg.load,
                                                 cfg.v_dc_ref, cfg.r_ref,
                                                 cfg.eta());
    print_kv("psi", d.psi);
    print_kv("b", d.b);
    print_kv("disc", d.disc);
    print_kv("root_lo", d.root_lo);
    print_kv("root_hi", d.root_hi);
    print_kv("n_positive", d.n_positive);
    print_kv("unique_positive", d.unique_positive ? 1.0 : 0.0);
    if (d.n_real > 0 && d.root_hi > 0.0) {
      print_kv("mu", d.root_hi);
    } else {
      throw gfm::InfeasibleError(
          "requested ac amplitude is not reachable at this load");
    }
    return 0;
  }

  if (*an_pass) {
    const gfm::SimConfig cfg = load_input(preset, config_file);
    const gfm::Equilibrium eq = design_equilibrium(cfg);
    const gfm::PassivityReport pr = gfm::passivity_certificate(
        cfg.conv, cfg.conv.g + cfg.load.g_l, cfg.pid.k_p, eq, cfg.eta());
    print_kv("mu", eq.mu);
    print_kv("lhs", pr.lhs);
    print_kv("rhs", pr.rhs);
    print_kv("margin", pr.margin);
    print_kv("passive", pr.passive ? 1.0 : 0.0);
    return 0;
  }

  if (*an_droop) {
    const gfm::SimConfig cfg = load_input(preset, config_file);
    const gfm::DroopFixedPoint fp = gfm::droop_fixed_point(
        cfg.conv, cfg.load, cfg.droop, cfg.v_dc_ref, cfg.eta());
    print_kv("mu", fp.mu);
    print_kv("v_ac_amplitude", fp.amplitude);
    print_kv("p_load", fp.p_load);
    return 0;
  }

  if (*an_share) {
    const gfm::SimConfig cfg = load_input(preset, config_file);
    const gfm::TwoConverterNetwork tn{
        cfg.conv,      cfg.net.line, cfg.net.c_net, cfg.net.g_net,
        cfg.pid,       cfg.net.pid2, cfg.mu_fixed,  cfg.net.mu2,
        cfg.v_dc_ref,  cfg.eta()};
    const gfm::NetworkEquilibrium eq = gfm::solve_network_equilibrium(tn);
    print_kv("v_dc", eq.v_dc);
    print_kv("delta", eq.delta);
    print_kv("omega", eq.omega);
    print_kv("p_1", eq.p1);
    print_kv("p_2", eq.p2);
    print_kv("p_ratio", eq.p1 / eq.p2);
    print_kv("v_bus_1", std::abs(eq.v1));
    print_kv("v_bus_2", std::abs(eq.v2));
    print_kv("v_net", std::abs(eq.vnet));
    return 0;
  }

  if (*an_nose) {
    const gfm::NosePoints np = gfm::nose_points(i0, k_tot, p_x);
    const double eta = gfm::matching_eta(100.0 * M_PI, 1000.0);
    print_kv("p_max", np.p_max);
    print_kv("v_high", np.v_high);
    print_kv("v_low", np.v_low);
    print_kv("p_at_omega", gfm::p_of_omega(i0, k_tot, eta, omega_q));
    print_kv("d_p_d_omega", gfm::omega_sensitivity(i0, k_tot, eta, omega_q));
    print_kv("d_p_d_r",
             gfm::amplitude_droop_slope(i0, k_tot, eta, omega_q, mu_q));
    return 0;
  }

  if (*ver) {
    const std::vector<gfm::Check> checks =
        suite == "quick" ? gfm::verify_quick() : gfm::verify_acceptance();
    bool all = true;
    for (const gfm::Check& c : checks) {
      std::printf("%-22s %s  %s\n", c.name.c_str(),
                  c.pass ? "PASS" : "FAIL", c.detail.c_str());
      all = all && c.pass;
    }
    std::printf("%s: %zu checks, %s\n", suite.c_str(), checks.size(),
                all ? "all passed" : "FAILURES PRESENT");
    return all ? 0 : 1;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const gfm::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const gfm::InfeasibleError& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return 3;
  } catch (const gfm::BlowupError& e) {
    std::fprintf(stderr, "diverged: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
