#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "sspiv/direction.hpp"

namespace sspiv {

/// Flat indexing of spherical-harmonic channels: (n, m) <-> n^2 + n + m.
struct ShIndexing {
  int order = 0;

  explicit ShIndexing(int n) : order(n) {}

  int channels() const { return (order + 1) * (order + 1); }
  static int flat(int n, int m) { return n * n + n + m; }
  static int degree_of(int flat_index);
  static int order_of(int flat_index);  // the m of a flat index
};

/// Complex orthonormal spherical harmonics with the Condon-Shortley phase.
/// Row q holds Y_n^m(dir q) for all (n, m) up to `order`, flat-indexed.
Eigen::MatrixXcd evaluate_sh_basis(std::span<const Direction> directions, int order);

/// Single-direction convenience: a ((order+1)^2)-vector.
Eigen::VectorXcd sh_vector(const Direction& d, int order);

}  // namespace sspiv
