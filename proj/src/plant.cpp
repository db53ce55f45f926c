#include "gfmatch/plant.hpp"

namespace gfm {

void converter_rhs(const ConverterParams& p, double c_eff, double i_dc,
                   AbVec m, AbVec i_out, const double* x, double* dx) {
  const double v_dc = x[0];
  const double i_a = x[1], i_b = x[2];
  const double v_a = x[3], v_b = x[4];
  dx[0] = (-p.g_dc * v_dc + i_dc - 0.5 * (m.a * i_a + m.b * i_b)) / c_eff;
  dx[1] = (-p.r * i_a - v_a + 0.5 * m.a * v_dc) / p.l;
  dx[2] = (-p.r * i_b - v_b + 0.5 * m.b * v_dc) / p.l;
  dx[3] = (-p.g * v_a + i_a - i_out.a) / p.c;
  dx[4] = (-p.g * v_b + i_b - i_out.b) / p.c;
}

void converter_rhs_dq(const ConverterParams& p, double c_eff, double i_dc,
                      double mu, double omega, DqVec i_out, const double* x,
                      double* dx) {
  const double v_dc = x[0];
  const double i_d = x[1], i_q = x[2];
  const double v_d = x[3], v_q = x[4];
  // Rotation at `omega` adds -omega*J to both branch equations.
  dx[0] = (-p.g_dc * v_dc + i_dc - 0.5 * mu * i_q) / c_eff;
  dx[1] = (-p.r * i_d + omega * p.l * i_q - v_d) / p.l;
  dx[2] = (-p.r * i_q - omega * p.l * i_d - v_q + 0.5 * mu * v_dc) / p.l;
  dx[3] = (-p.g * v_d + omega * p.c * v_q + i_d - i_out.d) / p.c;
  dx[4] = (-p.g * v_q - omega * p.c * v_d + i_q - i_out.q) / p.c;
}

void machine_rhs(const MachineParams& p, AbVec i_out, const double* x,
                 double* dx) {
  const double s = std::sin(x[0]), c = std::cos(x[0]);
  const double w = x[1];
  const double i_a = x[2], i_b = x[3];
  const double v_a = x[4], v_b = x[5];
  // Electrical torque and back-EMF share the excitation flux lm_if.
  dx[0] = w;
  dx[1] = (-p.d * w + p.tau_m + p.lm_if * (-s * i_a + c * i_b)) / p.m;
  dx[2] = (-p.r_s * i_a - v_a + p.lm_if * s * w) / p.l_s;
  dx[3] = (-p.r_s * i_b - v_b - p.lm_if * c * w) / p.l_s;
  dx[4] = (-p.g * v_a + i_a - i_out.a) / p.c;
  dx[5] = (-p.g * v_b + i_b - i_out.b) / p.c;
}

AbVec load_current(const LoadParams& p, AbVec v, double theta) {
  const AbVec s = inverse_park(DqVec{p.s_d, p.s_q}, theta);
  return {p.g_l * v.a - p.b_l * v.b + s.a, p.b_l * v.a + p.g_l * v.b + s.b};
}

DqVec load_current_dq(const LoadParams& p, DqVec v) {
  return {p.g_l * v.d - p.b_l * v.q + p.s_d, p.b_l * v.d + p.g_l * v.q + p.s_q};
}

}  // namespace gfm
