#pragma once

#include <complex>

namespace sspiv {

enum class Baffle { RigidSphere, OpenSphere };

/// Spherical Bessel functions of the first and second kind and their
/// derivatives. x >= 0 (y_n and its derivative require x > 0).
double sph_bessel_j(int n, double x);
double sph_bessel_y(int n, double x);
double sph_bessel_j_deriv(int n, double x);
double sph_bessel_y_deriv(int n, double x);

/// Spherical Hankel function of the second kind, h_n^(2) = j_n - i y_n.
std::complex<double> sph_hankel2(int n, double x);
std::complex<double> sph_hankel2_deriv(int n, double x);

/// Mode strength b_n(kr) relating a unit plane wave's SH density to the
/// pressure on a sphere of radius r at wavenumber k.
///   open sphere:  4 pi i^n j_n(kr)
///   rigid sphere: 4 pi i^n [ j_n(kr) - j_n'(kr)/h2_n'(kr) * h2_n(kr) ]
/// k = 0 is handled by the series limits (b_0 -> 4 pi, b_{n>0} -> 0).
std::complex<double> mode_strength(int n, double k, double radius_m, Baffle baffle);

}  // namespace sspiv
