#pragma once

#include <cmath>

#include "gfmatch/errors.hpp"

namespace gfm {

// Stationary two-phase quantities (alpha/beta) and rotating-frame quantities
// (direct/quadrature) are distinct types so a frame mix-up is a compile error.

struct AbVec {
  double a{}, b{};
};

struct DqVec {
  double d{}, q{};
};

inline AbVec operator+(AbVec u, AbVec v) { return {u.a + v.a, u.b + v.b}; }
inline AbVec operator-(AbVec u, AbVec v) { return {u.a - v.a, u.b - v.b}; }
inline AbVec operator*(double k, AbVec v) { return {k * v.a, k * v.b}; }
inline double dot(AbVec u, AbVec v) { return u.a * v.a + u.b * v.b; }
inline double norm2(AbVec v) { return dot(v, v); }
inline double norm(AbVec v) { return std::sqrt(norm2(v)); }

inline DqVec operator+(DqVec u, DqVec v) { return {u.d + v.d, u.q + v.q}; }
inline DqVec operator-(DqVec u, DqVec v) { return {u.d - v.d, u.q - v.q}; }
inline DqVec operator*(double k, DqVec v) { return {k * v.d, k * v.q}; }
inline double dot(DqVec u, DqVec v) { return u.d * v.d + u.q * v.q; }
inline double norm2(DqVec v) { return dot(v, v); }
inline double norm(DqVec v) { return std::sqrt(norm2(v)); }

// Power-invariant Clarke transform: the transform matrix is orthonormal,
// so three-phase and two-phase instantaneous powers agree.
struct AbZero {
  AbVec ab;
  double zero{};
};

inline AbZero clarke(double xa, double xb, double xc) {
  const double k = std::sqrt(2.0 / 3.0);
  AbZero r;
  r.ab.a = k * (xa - 0.5 * xb - 0.5 * xc);
  r.ab.b = k * (std::sqrt(3.0) / 2.0) * (xb - xc);
  r.zero = k * (xa + xb + xc) / std::sqrt(2.0);
  return r;
}

struct Abc {
  double a{}, b{}, c{};
};

inline Abc inverse_clarke(AbZero x) {
  const double k = std::sqrt(2.0 / 3.0);
  const double h = std::sqrt(3.0) / 2.0;
  const double z = x.zero / std::sqrt(2.0);
  Abc r;
  r.a = k * (x.ab.a + z);
  r.b = k * (-0.5 * x.ab.a + h * x.ab.b + z);
  r.c = k * (-0.5 * x.ab.a - h * x.ab.b + z);
  return r;
}

// Park transform: project stationary-frame quantities onto a frame rotated
// by theta. Inverse rotates back.
inline DqVec park(AbVec x, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {c * x.a + s * x.b, -s * x.a + c * x.b};
}

inline AbVec inverse_park(DqVec x, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {c * x.d - s * x.q, s * x.d + c * x.q};
}

// Operators of the form a*I + b*J, with J the 90-degree rotator
// [[0,-1],[1,0]]. They commute and multiply exactly like complex numbers
// a + jb; every planar impedance/admittance in the model has this form.
struct PlanarOp {
  double a{}, b{};
};

inline PlanarOp operator+(PlanarOp u, PlanarOp v) { return {u.a + v.a, u.b + v.b}; }
inline PlanarOp operator-(PlanarOp u, PlanarOp v) { return {u.a - v.a, u.b - v.b}; }
inline PlanarOp operator*(PlanarOp u, PlanarOp v) {
  return {u.a * v.a - u.b * v.b, u.a * v.b + u.b * v.a};
}
inline PlanarOp operator*(double k, PlanarOp v) { return {k * v.a, k * v.b}; }

// Operator 2-norm. a*I + b*J is a scaled rotation, so this is also the
// gain on every vector: |Op x| = |Op| |x|.
inline double norm(PlanarOp o) { return std::hypot(o.a, o.b); }
inline double norm2(PlanarOp o) { return o.a * o.a + o.b * o.b; }

inline PlanarOp inverse(PlanarOp o) {
  const double n2 = norm2(o);
  if (!(n2 > 0.0) || !std::isfinite(n2)) {
    throw InfeasibleError("planar operator is singular");
  }
  return {o.a / n2, -o.b / n2};
}

inline PlanarOp identity_op() { return {1.0, 0.0}; }
inline PlanarOp rotator(double theta) { return {std::cos(theta), std::sin(theta)}; }

inline AbVec operator*(PlanarOp o, AbVec x) {
  return {o.a * x.a - o.b * x.b, o.b * x.a + o.a * x.b};
}

inline DqVec operator*(PlanarOp o, DqVec x) {
  return {o.a * x.d - o.b * x.q, o.b * x.d + o.a * x.q};
}

}  // namespace gfm
