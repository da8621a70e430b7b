#include <doctest.h>

#include <cmath>

#include "sspiv/direction.hpp"
#include "sspiv/special.hpp"
#include "test_support.hpp"

using namespace sspiv;
namespace ts = testsupport;

TEST_CASE("mode strength: open-sphere limits at k = 0") {
  CHECK(std::abs(mode_strength(0, 0.0, 0.042, Baffle::OpenSphere) -
                 std::complex<double>(4.0 * kPi, 0.0)) < 1e-14);
  CHECK(std::abs(mode_strength(1, 0.0, 0.042, Baffle::OpenSphere)) < 1e-14);
  CHECK(std::abs(mode_strength(3, 0.0, 0.042, Baffle::OpenSphere)) < 1e-14);
  // Rigid sphere shares the series limits.
  CHECK(std::abs(mode_strength(0, 0.0, 0.042, Baffle::RigidSphere) -
                 std::complex<double>(4.0 * kPi, 0.0)) < 1e-14);
  CHECK(std::abs(mode_strength(2, 0.0, 0.042, Baffle::RigidSphere)) < 1e-14);
}

TEST_CASE("mode strength: rigid sphere matches the arbitrary-precision table") {
  for (const auto& ref : ts::rigid_mode_strength_table()) {
    // radius 1 so k = kr
    const std::complex<double> got = mode_strength(ref.n, ref.kr, 1.0, Baffle::RigidSphere);
    CHECK(std::abs(got - ref.value) <= 1e-9 * std::abs(ref.value));
  }
}

TEST_CASE("mode strength: open sphere matches the table spot values") {
  for (const auto& ref : ts::open_mode_strength_table()) {
    const std::complex<double> got = mode_strength(ref.n, ref.kr, 1.0, Baffle::OpenSphere);
    CHECK(std::abs(got - ref.value) <= 1e-9 * std::max(1.0, std::abs(ref.value)));
  }
}

TEST_CASE("mode strength: closed-form reference route agrees") {
  for (double kr : {0.4, 0.9, 1.7, 3.1, 6.3, 12.0}) {
    for (int n = 0; n <= 3; ++n) {
      const auto got = mode_strength(n, kr, 1.0, Baffle::RigidSphere);
      const auto ref = ts::ref_mode_strength_rigid(n, kr);
      CHECK(std::abs(got - ref) <= 1e-9 * std::abs(ref));
    }
  }
}

TEST_CASE("mode strength: continuous at the tiny-argument switch") {
  for (int n = 0; n <= 3; ++n) {
    const auto just_above = mode_strength(n, 2e-12, 1.0, Baffle::RigidSphere);
    const auto limit = mode_strength(n, 0.0, 1.0, Baffle::RigidSphere);
    CHECK(std::abs(just_above - limit) < 1e-9);
  }
}

TEST_CASE("mode strength: domain errors") {
  CHECK_THROWS_AS(mode_strength(-1, 1.0, 0.042, Baffle::RigidSphere), std::invalid_argument);
  CHECK_THROWS_AS(mode_strength(0, -1.0, 0.042, Baffle::RigidSphere), std::invalid_argument);
  CHECK_THROWS_AS(mode_strength(0, 1.0, 0.0, Baffle::RigidSphere), std::invalid_argument);
}

TEST_CASE("spherical bessel: small-argument stability") {
  // j_n(x) ~ x^n / (2n+1)!! for small x
  CHECK(sph_bessel_j(0, 0.0) == doctest::Approx(1.0));
  CHECK(sph_bessel_j(1, 0.0) == doctest::Approx(0.0));
  CHECK(sph_bessel_j(3, 1e-4) == doctest::Approx(1e-12 / 105.0).epsilon(1e-6));
  CHECK(sph_bessel_j_deriv(1, 0.0) == doctest::Approx(1.0 / 3.0));
  for (double x : {0.3, 1.0, 4.0}) {
    for (int n = 0; n <= 3; ++n) {
      CHECK(sph_bessel_j(n, x) == doctest::Approx(ts::ref_sph_j(n, x)).epsilon(1e-12));
      CHECK(sph_bessel_y(n, x) == doctest::Approx(ts::ref_sph_y(n, x)).epsilon(1e-12));
    }
  }
}
