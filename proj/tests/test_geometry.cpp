#include <doctest.h>

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "sspiv/direction.hpp"
#include "sspiv/encoder.hpp"
#include "sspiv/geometry.hpp"
#include "sspiv/sh_basis.hpp"
#include "test_support.hpp"

using namespace sspiv;
namespace ts = testsupport;

namespace {
const char* data_dir() { return SSPIV_DATA_DIR; }
}

TEST_CASE("direction: azimuth wraps, inclination is validated") {
  CHECK(Direction(370.0, 10.0).az_deg == doctest::Approx(10.0));
  CHECK(Direction(-10.0, 10.0).az_deg == doctest::Approx(350.0));
  CHECK(Direction(720.0, 0.0).az_deg == doctest::Approx(0.0));
  CHECK_THROWS_AS(Direction(0.0, -0.001), std::invalid_argument);
  CHECK_THROWS_AS(Direction(0.0, 180.001), std::invalid_argument);
  CHECK_NOTHROW(Direction(0.0, 0.0));
  CHECK_NOTHROW(Direction(0.0, 180.0));
}

TEST_CASE("unit_vector: axis cases and high-precision reference") {
  const Eigen::Vector3d pole = unit_vector(Direction(0.0, 0.0));
  CHECK(pole.x() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(pole.z() == doctest::Approx(1.0).epsilon(1e-12));

  const Eigen::Vector3d y_axis = unit_vector(Direction(90.0, 90.0));
  CHECK(std::abs(y_axis.x()) < 1e-12);
  CHECK(y_axis.y() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(y_axis.z()) < 1e-12);

  const Eigen::Vector3d v = unit_vector(Direction(45.0, 60.0));
  const Eigen::Vector3d ref = ts::unit_vector_45_60_ref();
  CHECK((v - ref).norm() < 1e-15);

  for (const auto& d : ts::random_directions(200, 11)) {
    CHECK(std::abs(unit_vector(d).norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("unit_vector is inverse-consistent away from the poles") {
  for (const auto& d : ts::random_directions(500, 5)) {
    if (d.incl_deg < 1e-3 || d.incl_deg > 180.0 - 1e-3) continue;
    const Direction back = direction_from_unit(unit_vector(d));
    CHECK(std::abs(back.incl_deg - d.incl_deg) < 1e-9);
    double daz = std::abs(back.az_deg - d.az_deg);
    daz = std::min(daz, 360.0 - daz);
    CHECK(daz < 1e-9);
  }
}

TEST_CASE("sh basis: analytic anchor values") {
  const auto dirs = ts::random_directions(20, 3);
  const Eigen::MatrixXcd basis = evaluate_sh_basis(dirs, 3);
  for (Eigen::Index q = 0; q < basis.rows(); ++q) {
    CHECK(std::abs(basis(q, 0) - std::complex<double>(0.28209479177387814, 0.0)) < 1e-14);
  }

  // At the pole only m = 0 survives.
  const Direction pole(123.0, 0.0);
  const Eigen::VectorXcd ypole = sh_vector(pole, 3);
  for (int n = 0; n <= 3; ++n) {
    for (int m = -n; m <= n; ++m) {
      if (m != 0) CHECK(std::abs(ypole(ShIndexing::flat(n, m))) < 1e-14);
    }
  }

  // Convention pin: Y_3^2(theta = 1 rad, phi = 2 rad) from an independent
  // reference implementation.
  const Direction d(rad2deg(2.0), rad2deg(1.0));
  const std::complex<double> y32 = sh_vector(d, 3)(ShIndexing::flat(3, 2));
  CHECK(std::abs(y32 - std::complex<double>(-0.2555646979520824, -0.29589824630616246)) < 1e-12);

  // Closed-form order-1 cross-check.
  for (const auto& rd : ts::random_directions(50, 17)) {
    const Eigen::VectorXcd y = sh_vector(rd, 1);
    for (int m = -1; m <= 1; ++m) {
      CHECK(std::abs(y(ShIndexing::flat(1, m)) - ts::ref_y1m(m, rd.incl_deg, rd.az_deg)) <
            1e-13);
    }
  }
}

TEST_CASE("sh basis: orthonormal under spherical quadrature") {
  // Gauss-Legendre in cos(theta) x uniform azimuth; exact for order-3
  // products, so 1e-6 is loose.
  const int n_theta = 50, n_phi = 100;
  const ts::GaussLegendre gl = ts::gauss_legendre(n_theta);

  std::vector<Direction> nodes;
  nodes.reserve(n_theta * n_phi);
  for (int i = 0; i < n_theta; ++i) {
    const double incl = rad2deg(std::acos(gl.nodes[i]));
    for (int j = 0; j < n_phi; ++j) {
      nodes.emplace_back(360.0 * j / n_phi, incl);
    }
  }
  const Eigen::MatrixXcd basis = evaluate_sh_basis(nodes, 3);

  const double dphi = 2.0 * kPi / n_phi;
  for (int a = 0; a < 16; ++a) {
    for (int b = a; b < 16; ++b) {
      std::complex<double> acc = 0.0;
      for (int i = 0; i < n_theta; ++i) {
        for (int j = 0; j < n_phi; ++j) {
          const Eigen::Index row = static_cast<Eigen::Index>(i) * n_phi + j;
          acc += gl.weights[i] * dphi * basis(row, a) * std::conj(basis(row, b));
        }
      }
      const double expected = (a == b) ? 1.0 : 0.0;
      CHECK(std::abs(acc - expected) < 1e-6);
    }
  }
}

TEST_CASE("sh basis: addition theorem") {
  const auto dirs = ts::random_directions(40, 21);
  for (std::size_t i = 0; i + 1 < dirs.size(); i += 2) {
    const Eigen::VectorXcd ya = sh_vector(dirs[i], 3);
    const Eigen::VectorXcd yb = sh_vector(dirs[i + 1], 3);
    const double cos_delta = unit_vector(dirs[i]).dot(unit_vector(dirs[i + 1]));
    for (int n = 0; n <= 3; ++n) {
      std::complex<double> acc = 0.0;
      for (int m = -n; m <= n; ++m) {
        acc += ya(ShIndexing::flat(n, m)) * std::conj(yb(ShIndexing::flat(n, m)));
      }
      const double expected = (2.0 * n + 1.0) / (4.0 * kPi) * ts::legendre_p(n, cos_delta);
      CHECK(std::abs(acc.imag()) < 1e-9);
      CHECK(std::abs(acc.real() - expected) < 1e-9);
    }
  }
}

TEST_CASE("ShIndexing round-trips") {
  for (int n = 0; n <= 5; ++n) {
    for (int m = -n; m <= n; ++m) {
      const int flat = ShIndexing::flat(n, m);
      CHECK(ShIndexing::degree_of(flat) == n);
      CHECK(ShIndexing::order_of(flat) == m);
    }
  }
  CHECK(ShIndexing(3).channels() == 16);
}

TEST_CASE("load_geometry: reference fixture") {
  const ArrayGeometry g = load_geometry(std::string(data_dir()) + "/em32.json", 3);
  CHECK(g.num_sensors() == 32);
  CHECK(g.radius_m == doctest::Approx(0.042));
  CHECK(g.baffle == Baffle::RigidSphere);

  // Encoding matrix quality on the fixture.
  const ShEncoder enc(g, 3);
  CHECK(enc.condition_number() < 10.0);
  const Eigen::MatrixXcd ident = enc.pseudo_inverse() * enc.basis();
  CHECK((ident - Eigen::MatrixXcd::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("load_geometry: error cases") {
  namespace fs = std::filesystem;
  const fs::path dir = ts::temp_dir();

  SUBCASE("insufficient sensors") {
    std::string json = R"({"label":"small","radius_m":0.05,"baffle":"rigid","sensors":[)";
    for (int i = 0; i < 15; ++i) {
      json += "{\"az_deg\":" + std::to_string(i * 24) + ",\"incl_deg\":" +
              std::to_string(30 + (i % 5) * 25) + "}";
      if (i != 14) json += ",";
    }
    json += "]}";
    ts::write_file(dir / "small.json", json);
    CHECK_THROWS_WITH_AS(load_geometry((dir / "small.json").string(), 3),
                         doctest::Contains("insufficient sensors"), std::invalid_argument);
  }

  SUBCASE("empty file is a parse error") {
    ts::write_file(dir / "empty.json", "");
    CHECK_THROWS_AS(load_geometry((dir / "empty.json").string(), 3), std::runtime_error);
  }

  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_geometry((dir / "nope.json").string(), 3), std::runtime_error);
  }

  SUBCASE("duplicate sensors") {
    std::string json = R"({"label":"dup","radius_m":0.05,"baffle":"open","sensors":[)";
    for (int i = 0; i < 16; ++i) {
      json += R"({"az_deg":10,"incl_deg":45})";
      if (i != 15) json += ",";
    }
    json += "]}";
    ts::write_file(dir / "dup.json", json);
    CHECK_THROWS_WITH_AS(load_geometry((dir / "dup.json").string(), 3),
                         doctest::Contains("duplicate"), std::invalid_argument);
  }

  SUBCASE("bad baffle") {
    ts::write_file(dir / "baffle.json",
                   R"({"label":"x","radius_m":0.05,"baffle":"squishy","sensors":[]})");
    CHECK_THROWS_AS(load_geometry((dir / "baffle.json").string(), 3), std::runtime_error);
  }
}
