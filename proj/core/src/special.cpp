#include "sspiv/special.hpp"

#include <cmath>
#include <stdexcept>

#include "sspiv/direction.hpp"

namespace sspiv {
namespace {

// Below this argument the rigid-sphere ratio term underflows to the k = 0
// series limits anyway; switch to them exactly.
constexpr double kTinyArg = 1e-12;

std::complex<double> unit_imag_pow(int n) {
  switch (n & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace

double sph_bessel_j(int n, double x) {
  if (n < 0 || x < 0.0) throw std::invalid_argument("sph_bessel_j domain");
  return std::sph_bessel(static_cast<unsigned>(n), x);
}

double sph_bessel_y(int n, double x) {
  if (n < 0 || x <= 0.0) throw std::invalid_argument("sph_bessel_y domain");
  return std::sph_neumann(static_cast<unsigned>(n), x);
}

double sph_bessel_j_deriv(int n, double x) {
  if (x == 0.0) return n == 1 ? 1.0 / 3.0 : 0.0;
  if (n == 0) return -sph_bessel_j(1, x);
  return sph_bessel_j(n - 1, x) - (n + 1) / x * sph_bessel_j(n, x);
}

double sph_bessel_y_deriv(int n, double x) {
  if (n == 0) return -sph_bessel_y(1, x);
  return sph_bessel_y(n - 1, x) - (n + 1) / x * sph_bessel_y(n, x);
}

std::complex<double> sph_hankel2(int n, double x) {
  return {sph_bessel_j(n, x), -sph_bessel_y(n, x)};
}

std::complex<double> sph_hankel2_deriv(int n, double x) {
  return {sph_bessel_j_deriv(n, x), -sph_bessel_y_deriv(n, x)};
}

std::complex<double> mode_strength(int n, double k, double radius_m, Baffle baffle) {
  if (n < 0) throw std::invalid_argument("negative mode degree");
  if (k < 0.0) throw std::invalid_argument("negative wavenumber");
  if (radius_m <= 0.0) throw std::invalid_argument("non-positive radius");

  const double x = k * radius_m;
  if (x < kTinyArg) {
    return n == 0 ? std::complex<double>(4.0 * kPi, 0.0) : std::complex<double>(0.0, 0.0);
  }
  const std::complex<double> scale = 4.0 * kPi * unit_imag_pow(n);
  if (baffle == Baffle::OpenSphere) {
    return scale * sph_bessel_j(n, x);
  }
  const std::complex<double> ratio = sph_bessel_j_deriv(n, x) / sph_hankel2_deriv(n, x);
  return scale * (sph_bessel_j(n, x) - ratio * sph_hankel2(n, x));
}

}  // namespace sspiv
