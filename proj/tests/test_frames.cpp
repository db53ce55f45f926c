#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "gfmatch/planar.hpp"

using namespace gfm;

TEST_CASE("balanced three-phase set lands on the alpha axis") {
  const AbZero r = clarke(1.0, -0.5, -0.5);
  CHECK(r.ab.a == doctest::Approx(1.224744871391589).epsilon(1e-14));
  CHECK(std::abs(r.ab.b) < 1e-15);
  CHECK(std::abs(r.zero) < 1e-15);
}

TEST_CASE("common-mode set lands on the zero axis") {
  const AbZero r = clarke(1.0, 1.0, 1.0);
  CHECK(std::abs(r.ab.a) < 1e-15);
  CHECK(std::abs(r.ab.b) < 1e-15);
  CHECK(r.zero == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
}

TEST_CASE("clarke transform is orthonormal and invertible") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int k = 0; k < 1000; ++k) {
    const double xa = u(rng), xb = u(rng), xc = u(rng);
    const AbZero r = clarke(xa, xb, xc);
    const double n_abc = xa * xa + xb * xb + xc * xc;
    const double n_ab0 = norm2(r.ab) + r.zero * r.zero;
    CHECK(n_ab0 == doctest::Approx(n_abc).epsilon(1e-12));
    const Abc back = inverse_clarke(r);
    CHECK(back.a == doctest::Approx(xa).epsilon(1e-12));
    CHECK(back.b == doctest::Approx(xb).epsilon(1e-12));
    CHECK(back.c == doctest::Approx(xc).epsilon(1e-12));
  }
}

TEST_CASE("quarter-turn rotation maps the alpha axis to -q") {
  const DqVec r = park(AbVec{1.0, 0.0}, M_PI / 2.0);
  CHECK(std::abs(r.d) < 1e-15);
  CHECK(r.q == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("park round-trips and preserves the norm") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  std::uniform_real_distribution<double> ut(-20.0, 20.0);
  for (int k = 0; k < 1000; ++k) {
    const AbVec x{u(rng), u(rng)};
    const double th = ut(rng);
    const DqVec y = park(x, th);
    CHECK(norm(y) == doctest::Approx(norm(x)).epsilon(1e-13));
    const AbVec back = inverse_park(y, th);
    CHECK(back.a == doctest::Approx(x.a).epsilon(1e-12));
    CHECK(back.b == doctest::Approx(x.b).epsilon(1e-12));
  }
}

TEST_CASE("planar operators multiply and invert like complex numbers") {
  const PlanarOp z{0.1, 0.15708};
  const PlanarOp zi = inverse(z);
  CHECK(zi.a == doctest::Approx(2.8839947933050163).epsilon(1e-15));
  CHECK(zi.b == doctest::Approx(-4.5301790213235190).epsilon(1e-15));

  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int k = 0; k < 1000; ++k) {
    const PlanarOp p{u(rng), u(rng)}, q{u(rng), u(rng)};
    const std::complex<double> pc{p.a, p.b}, qc{q.a, q.b};
    const PlanarOp prod = p * q;
    const std::complex<double> ref = pc * qc;
    CHECK(prod.a == doctest::Approx(ref.real()).epsilon(1e-12));
    CHECK(prod.b == doctest::Approx(ref.imag()).epsilon(1e-12));
    const PlanarOp sum = p + q, diff = p - q;
    CHECK(sum.a == (pc + qc).real());
    CHECK(sum.b == (pc + qc).imag());
    CHECK(diff.a == (pc - qc).real());
    CHECK(diff.b == (pc - qc).imag());
    if (norm2(p) > 1e-12) {
      const std::complex<double> pinv = 1.0 / pc;
      const PlanarOp pi = inverse(p);
      CHECK(pi.a == doctest::Approx(pinv.real()).epsilon(1e-12));
      CHECK(pi.b == doctest::Approx(pinv.imag()).epsilon(1e-12));
    }
  }
}

TEST_CASE("a planar operator scales every vector by its norm") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int k = 0; k < 1000; ++k) {
    const PlanarOp o{u(rng), u(rng)};
    const AbVec x{u(rng), u(rng)};
    CHECK(norm(o * x) == doctest::Approx(norm(o) * norm(x)).epsilon(1e-12));
  }
}

TEST_CASE("singular planar operator refuses to invert") {
  CHECK_THROWS_AS(inverse(PlanarOp{0.0, 0.0}), InfeasibleError);
}

TEST_CASE("rotator composes angles") {
  const PlanarOp r = rotator(0.3) * rotator(0.4);
  CHECK(r.a == doctest::Approx(std::cos(0.7)).epsilon(1e-14));
  CHECK(r.b == doctest::Approx(std::sin(0.7)).epsilon(1e-14));
}
