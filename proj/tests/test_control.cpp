#include <cmath>
#include <random>

#include "doctest.h"
#include "gfmatch/control.hpp"

using namespace gfm;

TEST_CASE("frequency law scales dc voltage into rated frequency") {
  const double eta = matching_eta(100.0 * M_PI, 1000.0);
  CHECK(eta == doctest::Approx(0.3141592653589793).epsilon(1e-16));
  CHECK(eta * 1000.0 == doctest::Approx(100.0 * M_PI).epsilon(1e-16));
}

TEST_CASE("modulation vector has magnitude mu and leads the angle by 90 deg") {
  std::mt19937 rng(43);
  std::uniform_real_distribution<double> ut(-10.0, 10.0);
  std::uniform_real_distribution<double> um(0.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    const double th = ut(rng), mu = um(rng);
    const AbVec m = matching_modulation(th, mu);
    CHECK(norm(m) == doctest::Approx(mu).epsilon(1e-12));
    // perpendicular to the unit vector at theta
    CHECK(std::abs(m.a * std::cos(th) + m.b * std::sin(th)) < 1e-12);
  }
}

TEST_CASE("dc current command combines dispatch, proportional and integral") {
  const DcPid g{100.0, 2.0, 5.0, 0.0};
  CHECK(dc_current_command(g, 1000.0, 1000.0, 0.0) == 100.0);
  CHECK(dc_current_command(g, 1000.0, 990.0, 0.0) ==
        doctest::Approx(120.0).epsilon(1e-15));
  CHECK(dc_current_command(g, 1000.0, 1000.0, 3.0) ==
        doctest::Approx(115.0).epsilon(1e-15));
  CHECK(dc_integrator_rate(1000.0, 990.0) == 10.0);
}

TEST_CASE("amplitude-loop output vanishes exactly at its target point") {
  const double iq_star = -12.5;
  CHECK(pbc_output(iq_star, 1000.0, 1000.0, iq_star) == 0.0);
  CHECK(pbc_output(iq_star + 1.0, 1000.0, 1000.0, iq_star) ==
        doctest::Approx(1000.0).epsilon(1e-15));
  const PiPbcGains g{0.1, 10.0};
  CHECK(pbc_modulation(0.33, g, 0.0, 0.0) == 0.33);
  CHECK(pbc_modulation(0.33, g, 0.5, 0.01) ==
        doctest::Approx(0.33 - 0.05 - 0.1).epsilon(1e-13));
}

TEST_CASE("droop trades modulation against measured power, then clips") {
  const DroopGains g{0.33, 1e-5, 1e4};
  CHECK(droop_modulation(g, 1e4) == 0.33);
  CHECK(droop_modulation(g, 2e4) == doctest::Approx(0.43).epsilon(1e-13));
  CHECK(droop_modulation(g, 0.0) == doctest::Approx(0.23).epsilon(1e-13));
  CHECK(clamp_modulation(1.7) == 1.0);
  CHECK(clamp_modulation(-0.4) == 0.0);
  CHECK(clamp_modulation(0.5) == 0.5);
}
