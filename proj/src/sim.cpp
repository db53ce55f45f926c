#include "gfmatch/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "gfmatch/errors.hpp"
#include "gfmatch/plant.hpp"
#include "gfmatch/rk4.hpp"

namespace gfm {

namespace {

const double kBlank = std::numeric_limits<double>::quiet_NaN();

// State layouts.
// single (ab or dq): [theta, v_dc, i_x, i_y, v_x, v_y, xi, nu]
// machine:           [theta, omega, i_a, i_b, v_a, v_b]
// network:           [th1, vdc1, ia1, ib1, va1, vb1,
//                     th2, vdc2, ia2, ib2, va2, vb2,
//                     ina1, inb1, ina2, inb2, vna, vnb]
constexpr int kSingleN = 8;
constexpr int kMachineN = 6;
constexpr int kNetworkN = 18;

struct WarnLog {
  std::vector<std::string>* out{};
  bool strict{};
  std::map<std::string, int> counts;

  void warn(const std::string& key, const std::string& msg) {
    if (strict) throw ConfigError("strict mode: " + msg);
    int& c = counts[key];
    ++c;
    if (c <= 5) {
      out->push_back(msg);
    } else if (c == 6) {
      out->push_back(key + ": further warnings suppressed");
    }
  }
};

// Load-dependent controller constants, re-derived whenever an event touches
// the load or the amplitude reference.
struct CtrlConstants {
  double mu_ff{};
  double iq_star{};
};

void redesign(const SimConfig& c, CtrlConstants& k) {
  switch (c.ctrl) {
    case CtrlKind::Feedforward:
      k.mu_ff = amplitude_feedforward(c.conv, c.load, c.v_dc_ref, c.r_ref,
                                      c.eta()).mu;
      break;
    case CtrlKind::PiPbc: {
      const PbcDesign d =
          design_pi_pbc(c.conv, c.load, c.pid, c.v_dc_ref, c.r_ref, c.eta());
      k.mu_ff = d.mu_ff;
      k.iq_star = d.iq_star;
      break;
    }
    default:
      break;
  }
}

struct CtrlFlags {
  bool droop_clipped{};
  bool pbc_out_of_range{};
};

struct CtrlEval {
  double mu{};
  double i_dc{};
  double y{};  // amplitude-loop integrator rate
};

CtrlEval eval_ctrl(const SimConfig& c, const CtrlConstants& k, double v_dc,
                   double i_q, double p_load, double xi, double nu,
                   CtrlFlags* flags) {
  CtrlEval e;
  switch (c.ctrl) {
    case CtrlKind::None:
      e.mu = c.mu_fixed;
      break;
    case CtrlKind::Feedforward:
      e.mu = k.mu_ff;
      break;
    case CtrlKind::PiPbc:
      e.y = pbc_output(i_q, v_dc, c.v_dc_ref, k.iq_star);
      e.mu = pbc_modulation(k.mu_ff, c.pipbc, e.y, nu);
      if (e.mu < 0.0 || e.mu > 1.0) flags->pbc_out_of_range = true;
      break;
    case CtrlKind::Droop: {
      const double raw = droop_modulation(c.droop, p_load);
      e.mu = clamp_modulation(raw);
      if (e.mu != raw) flags->droop_clipped = true;
      break;
    }
  }
  e.i_dc = dc_current_command(c.pid, c.v_dc_ref, v_dc, xi);
  return e;
}

struct SingleRhs {
  const SimConfig* c{};
  const CtrlConstants* k{};
  CtrlFlags* flags{};
  double eta{}, c_eff{};
  bool dq{};

  void operator()(double, const double* x, double* dx) const {
    const double th = x[0], v_dc = x[1];
    if (dq) {
      const DqVec i{x[2], x[3]}, v{x[4], x[5]};
      const DqVec il = load_current_dq(c->load, v);
      const CtrlEval e =
          eval_ctrl(*c, *k, v_dc, i.q, dot(v, il), x[6], x[7], flags);
      dx[0] = eta * v_dc;
      converter_rhs_dq(c->conv, c_eff, e.i_dc, e.mu, eta * v_dc, il, x + 1,
                       dx + 1);
      dx[6] = c->pid.k_i > 0.0 ? dc_integrator_rate(c->v_dc_ref, v_dc) : 0.0;
      dx[7] = e.y;
      return;
    }
    const double s = std::sin(th), co = std::cos(th);
    const AbVec i{x[2], x[3]}, v{x[4], x[5]};
    // park(i, th) quadrature component only, plus the load rotation, with a
    // single sin/cos evaluation.
    const double i_q = -s * i.a + co * i.b;
    const AbVec src{co * c->load.s_d - s * c->load.s_q,
                    s * c->load.s_d + co * c->load.s_q};
    const AbVec il{c->load.g_l * v.a - c->load.b_l * v.b + src.a,
                   c->load.b_l * v.a + c->load.g_l * v.b + src.b};
    const CtrlEval e =
        eval_ctrl(*c, *k, v_dc, i_q, dot(v, il), x[6], x[7], flags);
    const AbVec m{-e.mu * s, e.mu * co};
    dx[0] = eta * v_dc;
    converter_rhs(c->conv, c_eff, e.i_dc, m, il, x + 1, dx + 1);
    dx[6] = c->pid.k_i > 0.0 ? dc_integrator_rate(c->v_dc_ref, v_dc) : 0.0;
    dx[7] = e.y;
  }
};

struct MachineRhs {
  const SimConfig* c{};
  MachineParams mp{};

  void operator()(double, const double* x, double* dx) const {
    const AbVec v{x[4], x[5]};
    const AbVec il = load_current(c->load, v, x[0]);
    machine_rhs(mp, il, x, dx);
  }
};

struct NetworkRhs {
  const SimConfig* c{};
  double eta{};

  void operator()(double, const double* x, double* dx) const {
    for (int u = 0; u < 2; ++u) {
      const int b = 6 * u;
      const double th = x[b], v_dc = x[b + 1];
      const DcPid& pid = u == 0 ? c->pid : c->net.pid2;
      const double mu = u == 0 ? c->mu_fixed : c->net.mu2;
      const double i_dc = dc_current_command(pid, c->v_dc_ref, v_dc, 0.0);
      const AbVec m = matching_modulation(th, mu);
      const AbVec i_out{x[12 + 2 * u], x[13 + 2 * u]};
      dx[b] = eta * v_dc;
      converter_rhs(c->conv, c->conv.c_dc, i_dc, m, i_out, x + b + 1,
                    dx + b + 1);
    }
    const LineParams& ln = c->net.line;
    for (int u = 0; u < 2; ++u) {
      const int b = 12 + 2 * u;
      const int vb = 6 * u + 4;
      dx[b] = (-ln.r_net * x[b] + x[vb] - x[16]) / ln.l_net;
      dx[b + 1] = (-ln.r_net * x[b + 1] + x[vb + 1] - x[17]) / ln.l_net;
    }
    dx[16] = (-c->net.g_net * x[16] + x[12] + x[14]) / c->net.c_net;
    dx[17] = (-c->net.g_net * x[17] + x[13] + x[15]) / c->net.c_net;
  }
};

std::vector<std::string> single_columns() {
  return {"t",   "v_dc", "theta", "omega", "i_alpha", "i_beta",
          "v_alpha", "v_beta", "i_d", "i_q", "v_d", "v_q",
          "mu",  "i_dc_cmd", "v_ac_amplitude", "P_x", "P_l", "V_storage"};
}

std::vector<std::string> network_columns() {
  std::vector<std::string> cols{"t"};
  for (int u = 1; u <= 2; ++u) {
    const std::string sfx = "_" + std::to_string(u);
    for (const char* base :
         {"v_dc", "theta", "omega", "i_alpha", "i_beta", "v_alpha", "v_beta",
          "i_d", "i_q", "v_d", "v_q", "mu", "i_dc_cmd", "v_ac_amplitude",
          "P_x"}) {
      cols.push_back(base + sfx);
    }
  }
  for (const char* extra : {"i_net_alpha_1", "i_net_beta_1", "i_net_alpha_2",
                            "i_net_beta_2", "v_net_alpha", "v_net_beta",
                            "P_l"}) {
    cols.push_back(extra);
  }
  return cols;
}

// Storage-energy monitor: per segment, hold the active equilibrium and check
// that the energy never rises by more than a fixed slack above its running
// value. Disabled (with a warning) whenever no reference equilibrium exists.
struct Monitor {
  bool active{};
  int level{1};
  Equilibrium eq;
  double kappa_i{};
  double v_prev{};
  double slack{};

  double energy(const SimConfig& c, const double* x, bool dq_state) const {
    DqVec i, v;
    if (dq_state) {
      i = {x[2], x[3]};
      v = {x[4], x[5]};
    } else {
      i = park(AbVec{x[2], x[3]}, x[0]);
      v = park(AbVec{x[4], x[5]}, x[0]);
    }
    return storage_energy(c.conv, c.pid, kappa_i, eq, x[1], i, v, x[6], x[7],
                          level);
  }
};

Monitor make_monitor(const SimConfig& c, const CtrlConstants& k,
                     const double* x, bool dq_state, WarnLog& wl) {
  Monitor m;
  if (!c.sim.monitor ||
      (c.kind != ModelKind::SingleAb && c.kind != ModelKind::SingleDq)) {
    return m;
  }
  try {
    switch (c.ctrl) {
      case CtrlKind::None:
        if (c.pid.k_i > 0.0) {
          m.eq = solve_equilibrium_pid(c.conv, c.load, c.pid, c.v_dc_ref,
                                       c.mu_fixed, c.eta());
          m.level = 2;
        } else {
          m.eq = solve_equilibrium_p(c.conv, c.load, c.pid, c.v_dc_ref,
                                     c.mu_fixed, c.eta());
          m.level = 1;
        }
        break;
      case CtrlKind::Feedforward:
        m.eq = solve_equilibrium_pid(c.conv, c.load, c.pid, c.v_dc_ref,
                                     k.mu_ff, c.eta());
        m.level = 2;
        break;
      case CtrlKind::PiPbc:
        m.eq = solve_equilibrium_pid(c.conv, c.load, c.pid, c.v_dc_ref,
                                     k.mu_ff, c.eta());
        m.level = 3;
        m.kappa_i = c.pipbc.kappa_i;
        break;
      case CtrlKind::Droop: {
        const DroopFixedPoint fp =
            droop_fixed_point(c.conv, c.load, c.droop, c.v_dc_ref, c.eta());
        m.eq = solve_equilibrium_pid(c.conv, c.load, c.pid, c.v_dc_ref, fp.mu,
                                     c.eta());
        m.level = 2;
        break;
      }
    }
  } catch (const std::runtime_error& e) {
    wl.warn("monitor", std::string("storage monitor disabled: ") + e.what());
    return m;
  }
  m.active = true;
  m.v_prev = m.energy(c, x, dq_state);
  m.slack = 1e-8 * m.v_prev;
  return m;
}

bool event_touches_design(const std::string& f) {
  return f == "g_l" || f == "b_l" || f == "s_d" || f == "s_q" || f == "r_ref";
}

void emit_single_row(TimeSeries& ts, const SimConfig& c, const CtrlConstants& k,
                     const Monitor& mon, double t, const double* x, bool dq) {
  CtrlFlags scratch;
  double row[18];
  const double th = x[0], v_dc = x[1];
  AbVec i_ab, v_ab;
  DqVec i_dq, v_dq;
  double p_load;
  if (dq) {
    i_dq = {x[2], x[3]};
    v_dq = {x[4], x[5]};
    i_ab = inverse_park(i_dq, th);
    v_ab = inverse_park(v_dq, th);
    p_load = dot(v_dq, load_current_dq(c.load, v_dq));
  } else {
    i_ab = {x[2], x[3]};
    v_ab = {x[4], x[5]};
    i_dq = park(i_ab, th);
    v_dq = park(v_ab, th);
    p_load = dot(v_ab, load_current(c.load, v_ab, th));
  }
  const CtrlEval e =
      eval_ctrl(c, k, v_dc, i_dq.q, p_load, x[6], x[7], &scratch);
  row[0] = t;
  row[1] = v_dc;
  row[2] = th;
  row[3] = c.eta() * v_dc;
  row[4] = i_ab.a;
  row[5] = i_ab.b;
  row[6] = v_ab.a;
  row[7] = v_ab.b;
  row[8] = i_dq.d;
  row[9] = i_dq.q;
  row[10] = v_dq.d;
  row[11] = v_dq.q;
  row[12] = e.mu;
  row[13] = e.i_dc;
  row[14] = norm(v_dq);
  row[15] = bridge_power_dq(e.mu, v_dc, i_dq);
  row[16] = p_load;
  row[17] = mon.active ? mon.energy(c, x, dq) : kBlank;
  ts.push_row(row);
}

void emit_machine_row(TimeSeries& ts, const SimConfig& c,
                      const MachineParams& mp, double t, const double* x) {
  double row[18];
  const double th = x[0], w = x[1];
  const AbVec i_ab{x[2], x[3]}, v_ab{x[4], x[5]};
  const DqVec i_dq = park(i_ab, th), v_dq = park(v_ab, th);
  const double s = std::sin(th), co = std::cos(th);
  const double eta = c.eta();
  row[0] = t;
  row[1] = w / eta;  // dc-voltage analog of rotor speed
  row[2] = th;
  row[3] = w;
  row[4] = i_ab.a;
  row[5] = i_ab.b;
  row[6] = v_ab.a;
  row[7] = v_ab.b;
  row[8] = i_dq.d;
  row[9] = i_dq.q;
  row[10] = v_dq.d;
  row[11] = v_dq.q;
  row[12] = -2.0 * eta * mp.lm_if;  // matched modulation amplitude
  row[13] = eta * mp.tau_m;         // matched dc current dispatch
  row[14] = norm(v_dq);
  row[15] = -mp.lm_if * w * (-s * i_ab.a + co * i_ab.b);
  row[16] = dot(v_ab, load_current(c.load, v_ab, th));
  row[17] = kBlank;
  ts.push_row(row);
}

void emit_network_row(TimeSeries& ts, const SimConfig& c, double t,
                      const double* x) {
  double row[38];
  int idx = 0;
  row[idx++] = t;
  const double eta = c.eta();
  for (int u = 0; u < 2; ++u) {
    const int b = 6 * u;
    const double th = x[b], v_dc = x[b + 1];
    const DcPid& pid = u == 0 ? c.pid : c.net.pid2;
    const double mu = u == 0 ? c.mu_fixed : c.net.mu2;
    const AbVec i_ab{x[b + 2], x[b + 3]}, v_ab{x[b + 4], x[b + 5]};
    const DqVec i_dq = park(i_ab, th), v_dq = park(v_ab, th);
    row[idx++] = v_dc;
    row[idx++] = th;
    row[idx++] = eta * v_dc;
    row[idx++] = i_ab.a;
    row[idx++] = i_ab.b;
    row[idx++] = v_ab.a;
    row[idx++] = v_ab.b;
    row[idx++] = i_dq.d;
    row[idx++] = i_dq.q;
    row[idx++] = v_dq.d;
    row[idx++] = v_dq.q;
    row[idx++] = mu;
    row[idx++] = dc_current_command(pid, c.v_dc_ref, v_dc, 0.0);
    row[idx++] = norm(v_dq);
    row[idx++] = bridge_power_dq(mu, v_dc, i_dq);
  }
  for (int j = 12; j < 18; ++j) row[idx++] = x[j];
  row[idx++] = c.net.g_net * (x[16] * x[16] + x[17] * x[17]);
  ts.push_row(row);
}

}  // namespace

// Mutable parameter slot a timed event may write.
double* event_field(SimConfig& c, const std::string& f) {
  if (f == "g_l") return &c.load.g_l;
  if (f == "b_l") return &c.load.b_l;
  if (f == "s_d") return &c.load.s_d;
  if (f == "s_q") return &c.load.s_q;
  if (f == "g_net") return &c.net.g_net;
  if (f == "i_dc_ref") return &c.pid.i_dc_ref;
  if (f == "k_p") return &c.pid.k_p;
  if (f == "k_i") return &c.pid.k_i;
  if (f == "i_dc_ref_2") return &c.net.pid2.i_dc_ref;
  if (f == "k_p_2") return &c.net.pid2.k_p;
  if (f == "mu") return &c.mu_fixed;
  if (f == "mu_2") return &c.net.mu2;
  if (f == "mu_ref") return &c.droop.mu_ref;
  if (f == "d_v") return &c.droop.d_v;
  if (f == "p_ref") return &c.droop.p_ref;
  if (f == "kappa_p") return &c.pipbc.kappa_p;
  if (f == "kappa_i") return &c.pipbc.kappa_i;
  if (f == "r_ref") return &c.r_ref;
  return nullptr;
}

SimResult run_simulation(const SimConfig& cfg) {
  validate_config(cfg);
  const auto t_start = std::chrono::steady_clock::now();

  SimConfig c = cfg;  // events mutate the live copy
  SimResult res;
  WarnLog wl{&res.warnings, c.sim.strict, {}};

  const double dt = c.sim.dt;
  const long n_steps = std::lround(c.sim.t_end / dt);
  if (std::abs(n_steps * dt - c.sim.t_end) > 1e-9 * std::max(1.0, c.sim.t_end)) {
    wl.warn("grid", "t_end adjusted to the integration grid");
  }

  // Snap events onto the step grid, keeping their listed order at equal times.
  struct PendingEvent {
    long step;
    Event ev;
  };
  std::vector<PendingEvent> pending;
  for (const Event& ev : c.events) {
    const long step = std::lround(ev.t / dt);
    if (std::abs(step * dt - ev.t) > 1e-9 * std::max(1.0, std::abs(ev.t))) {
      wl.warn("events", "event time " + std::to_string(ev.t) +
                            " snapped to the integration grid");
    }
    pending.push_back({step, ev});
  }
  std::stable_sort(pending.begin(), pending.end(),
                   [](const PendingEvent& a, const PendingEvent& b) {
                     return a.step < b.step;
                   });

  const bool dq_state = c.kind == ModelKind::SingleDq;
  const bool single =
      c.kind == ModelKind::SingleAb || c.kind == ModelKind::SingleDq;

  CtrlConstants k;
  redesign(c, k);

  double x[kMaxStates] = {0.0};
  int n = 0;
  MachineParams mp{};
  if (single) {
    n = kSingleN;
    x[1] = c.v_dc_ref;
  } else if (c.kind == ModelKind::Machine) {
    n = kMachineN;
    mp = matched_machine(c.conv, c.eta(), c.mu_fixed, c.pid.i_dc_ref);
    x[1] = c.eta() * c.v_dc_ref;
  } else {
    n = kNetworkN;
    if (c.net.init_equilibrium) {
      TwoConverterNetwork tn{c.conv,      c.net.line, c.net.c_net, c.net.g_net,
                             c.pid,       c.net.pid2, c.mu_fixed,  c.net.mu2,
                             c.v_dc_ref,  c.eta()};
      const NetworkEquilibrium eq = solve_network_equilibrium(tn);
      x[0] = eq.delta;
      x[1] = eq.v_dc;
      x[2] = eq.i1.real();
      x[3] = eq.i1.imag();
      x[4] = eq.v1.real();
      x[5] = eq.v1.imag();
      x[6] = 0.0;
      x[7] = eq.v_dc;
      x[8] = eq.i2.real();
      x[9] = eq.i2.imag();
      x[10] = eq.v2.real();
      x[11] = eq.v2.imag();
      x[12] = eq.inet1.real();
      x[13] = eq.inet1.imag();
      x[14] = eq.inet2.real();
      x[15] = eq.inet2.imag();
      x[16] = eq.vnet.real();
      x[17] = eq.vnet.imag();
    } else {
      x[1] = c.v_dc_ref;
      x[7] = c.v_dc_ref;
    }
  }

  res.ts.cols = c.kind == ModelKind::Network ? network_columns() : single_columns();

  CtrlFlags flags;
  SingleRhs srhs{&c, &k, &flags, c.eta(), c.conv.c_dc + c.pid.k_d, dq_state};
  MachineRhs mrhs{&c, mp};
  NetworkRhs nrhs{&c, c.eta()};

  Monitor mon = make_monitor(c, k, x, dq_state, wl);

  size_t next_event = 0;
  bool warned_clip = false, warned_range = false;
  for (long i = 0; i <= n_steps; ++i) {
    const double t = i * dt;

    bool params_changed = false, design_changed = false;
    while (next_event < pending.size() && pending[next_event].step <= i) {
      const Event& ev = pending[next_event].ev;
      double* f = event_field(c, ev.field);
      if (f == nullptr) {
        throw ConfigError("unknown event field: " + ev.field);
      }
      if (ev.action == "set") {
        *f = ev.value;
      } else {
        *f *= ev.value;
      }
      params_changed = true;
      design_changed = design_changed || event_touches_design(ev.field);
      ++next_event;
    }
    if (params_changed) {
      if (design_changed && (c.ctrl == CtrlKind::Feedforward ||
                             c.ctrl == CtrlKind::PiPbc)) {
        redesign(c, k);
        wl.warn("redesign", "amplitude constants re-derived at t = " +
                                std::to_string(t));
      }
      srhs.c_eff = c.conv.c_dc + c.pid.k_d;
      mon = make_monitor(c, k, x, dq_state, wl);
    }

    if (i % c.sim.decimate == 0 || i == n_steps) {
      if (single) {
        emit_single_row(res.ts, c, k, mon, t, x, dq_state);
      } else if (c.kind == ModelKind::Machine) {
        emit_machine_row(res.ts, c, mp, t, x);
      } else {
        emit_network_row(res.ts, c, t, x);
      }
    }
    if (i == n_steps) break;

    if (single) {
      rk4_step(srhs, t, dt, x, n);
    } else if (c.kind == ModelKind::Machine) {
      rk4_step(mrhs, t, dt, x, n);
    } else {
      rk4_step(nrhs, t, dt, x, n);
    }
    check_state_finite(x, n, t + dt);

    if (flags.droop_clipped && !warned_clip) {
      wl.warn("clip", "droop modulation clipped to [0, 1]");
      warned_clip = true;
    }
    if (flags.pbc_out_of_range && !warned_range) {
      wl.warn("range", "amplitude command left [0, 1] during the transient");
      warned_range = true;
    }

    if (mon.active) {
      const double v_new = mon.energy(c, x, dq_state);
      if (v_new > mon.v_prev + mon.slack) ++res.monitor_violations;
      mon.v_prev = v_new;
      ++res.monitor_steps;
    }
  }

  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return res;
}

}  // namespace gfm
