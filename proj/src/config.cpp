#include "gfmatch/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "gfmatch/errors.hpp"

namespace gfm {

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::SingleAb: return "single_ab";
    case ModelKind::SingleDq: return "single_dq";
    case ModelKind::Machine: return "machine";
    case ModelKind::Network: return "network";
  }
  return "?";
}

std::string to_string(CtrlKind k) {
  switch (k) {
    case CtrlKind::None: return "none";
    case CtrlKind::Feedforward: return "feedforward";
    case CtrlKind::PiPbc: return "pi_pbc";
    case CtrlKind::Droop: return "droop";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "single_ab") return ModelKind::SingleAb;
  if (s == "single_dq") return ModelKind::SingleDq;
  if (s == "machine") return ModelKind::Machine;
  if (s == "network") return ModelKind::Network;
  throw ConfigError("unknown model kind: " + s);
}

CtrlKind ctrl_kind_from_string(const std::string& s) {
  if (s == "none") return CtrlKind::None;
  if (s == "feedforward") return CtrlKind::Feedforward;
  if (s == "pi_pbc") return CtrlKind::PiPbc;
  if (s == "droop") return CtrlKind::Droop;
  throw ConfigError("unknown controller: " + s);
}

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_number(const std::string& v, int line_no) {
  char* end = nullptr;
  const std::string t = trim(v);
  const double x = std::strtod(t.c_str(), &end);
  if (end == t.c_str() || *end != '\0' || !std::isfinite(x)) {
    throw ConfigError("line " + std::to_string(line_no) +
                      ": expected a number, got '" + v + "'");
  }
  return x;
}

bool parse_bool(const std::string& v, int line_no) {
  const std::string t = trim(v);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError("line " + std::to_string(line_no) +
                    ": expected a boolean, got '" + v + "'");
}

struct Line {
  std::string key, value;
  int no;
};

}  // namespace

SimConfig parse_config_text(const std::string& text) {
  SimConfig cfg;
  std::map<std::string, std::vector<Line>> sections;
  std::vector<std::vector<Line>> event_blocks;

  std::istringstream in(text);
  std::string raw;
  std::string current = "";
  bool current_is_event = false;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.size() >= 4 && line.substr(0, 2) == "[[" &&
          line.substr(line.size() - 2) == "]]") {
        const std::string name = trim(line.substr(2, line.size() - 4));
        if (name != "events") {
          throw ConfigError("line " + std::to_string(line_no) +
                            ": unknown block [[" + name + "]]");
        }
        event_blocks.emplace_back();
        current_is_event = true;
        continue;
      }
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(line_no) +
                          ": malformed section header");
      }
      current = trim(line.substr(1, line.size() - 2));
      current_is_event = false;
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    Line l{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no};
    if (l.key.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    }
    if (current_is_event) {
      event_blocks.back().push_back(l);
    } else if (current.empty()) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": key outside any section");
    } else {
      sections[current].push_back(l);
    }
  }

  const std::set<std::string> known_sections = {
      "model", "converter", "load", "control", "network", "sim"};
  for (const auto& [name, _] : sections) {
    if (!known_sections.count(name)) {
      throw ConfigError("unknown section [" + name + "]");
    }
  }

  for (const Line& l : sections["model"]) {
    if (l.key == "kind") {
      cfg.kind = model_kind_from_string(l.value);
    } else if (l.key == "controller") {
      cfg.ctrl = ctrl_kind_from_string(l.value);
    } else {
      throw ConfigError("line " + std::to_string(l.no) +
                        ": unknown key '" + l.key + "' in [model]");
    }
  }

  for (const Line& l : sections["converter"]) {
    double* p = nullptr;
    if (l.key == "g_dc") p = &cfg.conv.g_dc;
    else if (l.key == "c_dc") p = &cfg.conv.c_dc;
    else if (l.key == "r") p = &cfg.conv.r;
    else if (l.key == "l") p = &cfg.conv.l;
    else if (l.key == "c") p = &cfg.conv.c;
    else if (l.key == "g") p = &cfg.conv.g;
    else
      throw ConfigError("line " + std::to_string(l.no) + ": unknown key '" +
                        l.key + "' in [converter]");
    *p = parse_number(l.value, l.no);
  }

  for (const Line& l : sections["load"]) {
    double* p = nullptr;
    if (l.key == "g_l") p = &cfg.load.g_l;
    else if (l.key == "b_l") p = &cfg.load.b_l;
    else if (l.key == "s_d") p = &cfg.load.s_d;
    else if (l.key == "s_q") p = &cfg.load.s_q;
    else
      throw ConfigError("line " + std::to_string(l.no) + ": unknown key '" +
                        l.key + "' in [load]");
    *p = parse_number(l.value, l.no);
  }

  for (const Line& l : sections["control"]) {
    double* p = nullptr;
    if (l.key == "v_dc_ref") p = &cfg.v_dc_ref;
    else if (l.key == "r_ref") p = &cfg.r_ref;
    else if (l.key == "omega0") p = &cfg.omega0;
    else if (l.key == "mu") p = &cfg.mu_fixed;
    else if (l.key == "i_dc_ref") p = &cfg.pid.i_dc_ref;
    else if (l.key == "k_p") p = &cfg.pid.k_p;
    else if (l.key == "k_i") p = &cfg.pid.k_i;
    else if (l.key == "k_d") p = &cfg.pid.k_d;
    else if (l.key == "kappa_p") p = &cfg.pipbc.kappa_p;
    else if (l.key == "kappa_i") p = &cfg.pipbc.kappa_i;
    else if (l.key == "mu_ref") p = &cfg.droop.mu_ref;
    else if (l.key == "d_v") p = &cfg.droop.d_v;
    else if (l.key == "p_ref") p = &cfg.droop.p_ref;
    else
      throw ConfigError("line " + std::to_string(l.no) + ": unknown key '" +
                        l.key + "' in [control]");
    *p = parse_number(l.value, l.no);
  }

  for (const Line& l : sections["network"]) {
    if (l.key == "init") {
      if (l.value == "equilibrium") cfg.net.init_equilibrium = true;
      else if (l.value == "flat") cfg.net.init_equilibrium = false;
      else
        throw ConfigError("line " + std::to_string(l.no) +
                          ": init must be 'equilibrium' or 'flat'");
      continue;
    }
    double* p = nullptr;
    if (l.key == "r_net") p = &cfg.net.line.r_net;
    else if (l.key == "l_net") p = &cfg.net.line.l_net;
    else if (l.key == "c_net") p = &cfg.net.c_net;
    else if (l.key == "g_net") p = &cfg.net.g_net;
    else if (l.key == "i_dc_ref_2") p = &cfg.net.pid2.i_dc_ref;
    else if (l.key == "k_p_2") p = &cfg.net.pid2.k_p;
    else if (l.key == "mu_2") p = &cfg.net.mu2;
    else
      throw ConfigError("line " + std::to_string(l.no) + ": unknown key '" +
                        l.key + "' in [network]");
    *p = parse_number(l.value, l.no);
  }

  for (const Line& l : sections["sim"]) {
    if (l.key == "t_end") cfg.sim.t_end = parse_number(l.value, l.no);
    else if (l.key == "dt") cfg.sim.dt = parse_number(l.value, l.no);
    else if (l.key == "decimate")
      cfg.sim.decimate = std::lround(parse_number(l.value, l.no));
    else if (l.key == "monitor") cfg.sim.monitor = parse_bool(l.value, l.no);
    else if (l.key == "strict") cfg.sim.strict = parse_bool(l.value, l.no);
    else
      throw ConfigError("line " + std::to_string(l.no) + ": unknown key '" +
                        l.key + "' in [sim]");
  }

  for (const auto& block : event_blocks) {
    Event ev;
    bool has_t = false, has_action = false, has_field = false, has_value = false;
    for (const Line& l : block) {
      if (l.key == "t") {
        ev.t = parse_number(l.value, l.no);
        has_t = true;
      } else if (l.key == "action") {
        ev.action = l.value;
        has_action = true;
      } else if (l.key == "field") {
        ev.field = l.value;
        has_field = true;
      } else if (l.key == "value" || l.key == "factor") {
        ev.value = parse_number(l.value, l.no);
        has_value = true;
      } else {
        throw ConfigError("line " + std::to_string(l.no) +
                          ": unknown key '" + l.key + "' in [[events]]");
      }
    }
    if (!has_t || !has_action || !has_field || !has_value) {
      throw ConfigError("[[events]] needs t, action, field and value/factor");
    }
    if (ev.action != "set" && ev.action != "scale") {
      throw ConfigError("event action must be 'set' or 'scale', got '" +
                        ev.action + "'");
    }
    cfg.events.push_back(ev);
  }

  validate_config(cfg);
  return cfg;
}

SimConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void validate_config(const SimConfig& cfg) {
  validate(cfg.conv);
  validate(cfg.load);
  if (!(cfg.v_dc_ref > 0.0)) throw ConfigError("v_dc_ref must be > 0");
  if (!(cfg.r_ref > 0.0)) throw ConfigError("r_ref must be > 0");
  if (!(cfg.omega0 > 0.0)) throw ConfigError("omega0 must be > 0");
  if (cfg.mu_fixed < 0.0 || cfg.mu_fixed > 1.0) {
    throw ConfigError("mu must lie in [0, 1]");
  }
  if (!(cfg.sim.t_end > 0.0)) throw ConfigError("t_end must be > 0");
  if (!(cfg.sim.dt > 0.0)) throw ConfigError("dt must be > 0");
  if (cfg.sim.dt > cfg.sim.t_end) throw ConfigError("dt exceeds t_end");
  if (cfg.sim.decimate < 1) throw ConfigError("decimate must be >= 1");

  if (cfg.kind == ModelKind::Machine && cfg.ctrl != CtrlKind::None) {
    throw ConfigError("the machine model takes no amplitude controller");
  }
  if (cfg.kind == ModelKind::Network) {
    if (cfg.ctrl != CtrlKind::None) {
      throw ConfigError("the network model uses fixed modulation amplitudes");
    }
    if (cfg.pid.k_i != 0.0 || cfg.net.pid2.k_i != 0.0) {
      throw ConfigError("the network model uses proportional-only dc control");
    }
    validate(cfg.net.line);
    if (!(cfg.net.c_net > 0.0)) throw ConfigError("c_net must be > 0");
    if (cfg.net.g_net < 0.0) throw ConfigError("g_net must be >= 0");
  }
  if (cfg.ctrl == CtrlKind::PiPbc && !(cfg.pid.k_i > 0.0)) {
    throw ConfigError("the amplitude PI loop needs k_i > 0 on the dc side");
  }

  // Events must land inside the run and touch known fields.
  SimConfig probe = cfg;
  for (const Event& ev : cfg.events) {
    if (ev.t < 0.0 || ev.t > cfg.sim.t_end) {
      throw ConfigError("event time outside [0, t_end]");
    }
    if (event_field(probe, ev.field) == nullptr) {
      throw ConfigError("unknown event field: " + ev.field);
    }
  }
}

}  // namespace gfm
