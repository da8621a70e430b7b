#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "sspiv/geometry.hpp"
#include "sspiv/sh_basis.hpp"
#include "sspiv/stft.hpp"

namespace sspiv {

/// SH-domain coefficients, indexed (sh channel, frame, bin). bin_freqs may
/// be a contiguous subset of the source STFT bins; bin_hz stays the native
/// STFT bin spacing.
struct ShCoefficients {
  int order = 0;
  std::size_t num_frames = 0;
  double hop_s = 0.0;
  double bin_hz = 0.0;
  std::vector<double> frame_times;
  std::vector<double> bin_freqs;
  std::vector<std::complex<double>> data;  // [frame][bin][channel]

  std::size_t num_channels() const {
    return static_cast<std::size_t>((order + 1) * (order + 1));
  }
  std::size_t num_bins() const { return bin_freqs.size(); }

  std::complex<double>* vec(std::size_t t, std::size_t k) {
    return data.data() + (t * num_bins() + k) * num_channels();
  }
  const std::complex<double>* vec(std::size_t t, std::size_t k) const {
    return data.data() + (t * num_bins() + k) * num_channels();
  }
  std::complex<double>& at(std::size_t ch, std::size_t t, std::size_t k) {
    return vec(t, k)[ch];
  }
  const std::complex<double>& at(std::size_t ch, std::size_t t, std::size_t k) const {
    return vec(t, k)[ch];
  }
};

/// Per-degree, per-bin mode strength values plus the regularized
/// compensation multipliers derived from them. The multiplier keeps the
/// exact phase of 1/b_n but floors |b_n| so the applied gain magnitude
/// never exceeds the cap.
struct ModeStrengthProfile {
  int order = 0;
  double radius_m = 0.0;
  double speed_of_sound = 343.0;
  double gain_cap_db = 20.0;
  std::vector<double> bin_freqs;
  std::vector<std::complex<double>> values;       // [degree][bin]
  std::vector<std::complex<double>> multipliers;  // [degree][bin]

  std::complex<double> value(int n, std::size_t k) const {
    return values[static_cast<std::size_t>(n) * bin_freqs.size() + k];
  }
  std::complex<double> multiplier(int n, std::size_t k) const {
    return multipliers[static_cast<std::size_t>(n) * bin_freqs.size() + k];
  }
};

ModeStrengthProfile make_mode_strength_profile(const ArrayGeometry& g, int order,
                                               const std::vector<double>& bin_freqs,
                                               double speed_of_sound = 343.0,
                                               double gain_cap_db = 20.0);

/// Applies the profile multipliers in place, one multiplier per (degree, bin).
void compensate(ShCoefficients& sh, const ModeStrengthProfile& profile);

/// Least-squares SH encoder for a fixed geometry and order. The
/// pseudo-inverse of the basis matrix is computed once at construction.
class ShEncoder {
 public:
  ShEncoder(const ArrayGeometry& geometry, int order);

  int order() const { return order_; }
  double condition_number() const { return condition_; }
  const Eigen::MatrixXcd& basis() const { return basis_; }         // sensors x channels
  const Eigen::MatrixXcd& pseudo_inverse() const { return pinv_; } // channels x sensors

  /// Per TF bin: SH vector = pinv(Y) * microphone vector.
  ShCoefficients encode(const TfTensor& tf, unsigned workers = 1) const;

 private:
  int order_;
  double condition_;
  Eigen::MatrixXcd basis_;
  Eigen::MatrixXcd pinv_;
};

}  // namespace sspiv
