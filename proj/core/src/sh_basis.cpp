#include "sspiv/sh_basis.hpp"

#include <cmath>
#include <stdexcept>

namespace sspiv {
namespace {

// Associated Legendre P_n^m(x) for m >= 0, Condon-Shortley phase included.
// Stable upward recurrence: seed P_m^m, then raise n.
void assoc_legendre_column(int order, int m, double x, std::vector<double>& out) {
  out.assign(order + 1, 0.0);
  const double somx2 = std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x)));
  double pmm = 1.0;
  for (int k = 1; k <= m; ++k) pmm *= -(2.0 * k - 1.0) * somx2;
  out[m] = pmm;
  if (m == order) return;
  double pm1 = x * (2.0 * m + 1.0) * pmm;
  out[m + 1] = pm1;
  for (int n = m + 2; n <= order; ++n) {
    const double p = (x * (2.0 * n - 1.0) * pm1 - (n + m - 1.0) * pmm) / (n - m);
    pmm = pm1;
    pm1 = p;
    out[n] = p;
  }
}

double norm_factor(int n, int m) {
  double ratio = 1.0;  // (n-m)! / (n+m)!
  for (int k = n - m + 1; k <= n + m; ++k) ratio /= k;
  return std::sqrt((2.0 * n + 1.0) / (4.0 * kPi) * ratio);
}

}  // namespace

int ShIndexing::degree_of(int flat_index) {
  const int n = static_cast<int>(std::floor(std::sqrt(static_cast<double>(flat_index))));
  return n;
}

int ShIndexing::order_of(int flat_index) {
  const int n = degree_of(flat_index);
  return flat_index - n * n - n;
}

Eigen::MatrixXcd evaluate_sh_basis(std::span<const Direction> directions, int order) {
  if (order < 0) throw std::invalid_argument("negative SH order");
  const int ch = (order + 1) * (order + 1);
  Eigen::MatrixXcd basis(static_cast<Eigen::Index>(directions.size()), ch);

  std::vector<double> pnm;
  for (Eigen::Index q = 0; q < basis.rows(); ++q) {
    const Direction& d = directions[static_cast<std::size_t>(q)];
    const double x = std::cos(deg2rad(d.incl_deg));
    const double ph = deg2rad(d.az_deg);
    for (int m = 0; m <= order; ++m) {
      assoc_legendre_column(order, m, x, pnm);
      const std::complex<double> e = std::polar(1.0, m * ph);
      for (int n = m; n <= order; ++n) {
        const std::complex<double> y = norm_factor(n, m) * pnm[n] * e;
        basis(q, ShIndexing::flat(n, m)) = y;
        if (m > 0) {
          // Y_n^{-m} = (-1)^m conj(Y_n^m)
          const double sign = (m % 2 == 0) ? 1.0 : -1.0;
          basis(q, ShIndexing::flat(n, -m)) = sign * std::conj(y);
        }
      }
    }
  }
  return basis;
}

Eigen::VectorXcd sh_vector(const Direction& d, int order) {
  return evaluate_sh_basis(std::span<const Direction>(&d, 1), order).row(0);
}

}  // namespace sspiv
