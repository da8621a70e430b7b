#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sspiv/encoder.hpp"

namespace sspiv {

struct SmoothingParams {
  double time_span_ms = 16.0;
  double freq_span_hz = 350.0;
  double f_min_hz = 800.0;
  double f_max_hz = 3500.0;
};

/// Region grid derived from SmoothingParams for a given coefficient tensor:
/// a sliding window of `frames_per_region` frames (stride 1) crossed with
/// non-overlapping bands of `bins_per_band` consecutive in-band bins. A
/// trailing group of fewer than bins_per_band bins is not used.
struct RegionPlan {
  std::size_t frames_per_region = 1;  // L
  std::size_t bins_per_band = 1;      // K
  std::size_t first_bin = 0;          // index into ShCoefficients bins
  std::size_t num_bands = 0;
  std::vector<double> band_center_hz;

  std::size_t band_begin(std::size_t band) const { return first_bin + band * bins_per_band; }
};

RegionPlan plan_regions(const ShCoefficients& sh, const SmoothingParams& p);

/// Time/frequency-smoothed SH covariance for the region centered at frame
/// t_center covering `bins` consecutive bins starting at first_bin:
/// R = 1/(L K) sum a a^H. Throws if fewer than L frames are available
/// around t_center.
Eigen::MatrixXcd covariance(const ShCoefficients& sh, std::size_t t_center,
                            std::size_t first_bin, std::size_t bins, std::size_t frames);

struct PrincipalSubspace {
  Eigen::VectorXcd vector;   // unit eigenvector, zeroth component real >= 0
  double eigenvalue_ratio;   // lambda_max / trace
};

/// Largest eigenpair of a Hermitian PSD matrix, phase-normalized so the
/// zeroth-order component is real and non-negative.
PrincipalSubspace principal_subspace(const Eigen::MatrixXcd& R);

/// Pseudointensity direction of an SH coefficient vector: the real part of
/// conj(u_00) times the degree-1 triple mapped to Cartesian dipoles,
/// normalized to unit length. Empty when there is no dipole energy.
std::optional<Eigen::Vector3d> piv_from_vector(const Eigen::VectorXcd& u);

struct PivVote {
  std::size_t frame = 0;
  std::size_t band = 0;
  double time_s = 0.0;
  double band_hz = 0.0;
  Eigen::Vector3d direction{0, 0, 0};
  double weight = 1.0;
};

struct PivField {
  std::vector<PivVote> votes;
};

/// One vote per (frame, band) region: covariance -> principal subspace ->
/// pseudointensity vector. Votes carry weight 1 unless eigen_weighting is
/// set, in which case the eigenvalue ratio is used. Regions without dipole
/// energy are skipped. Output order is (frame, band), independent of the
/// worker count.
PivField compute_sspiv_field(const ShCoefficients& sh, const SmoothingParams& p,
                             bool eigen_weighting = false, unsigned workers = 1);

/// Debug dump: frame_time_s, band_center_hz, x, y, z, weight.
void write_votes_csv(const std::string& path, const PivField& field);

}  // namespace sspiv
