#include "sspiv/encoder.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/SVD>

#include "sspiv/parallel.hpp"

namespace sspiv {

ModeStrengthProfile make_mode_strength_profile(const ArrayGeometry& g, int order,
                                               const std::vector<double>& bin_freqs,
                                               double speed_of_sound, double gain_cap_db) {
  if (order < 0) throw std::invalid_argument("negative SH order");
  if (!(speed_of_sound > 0.0)) throw std::invalid_argument("speed of sound must be > 0");

  ModeStrengthProfile p;
  p.order = order;
  p.radius_m = g.radius_m;
  p.speed_of_sound = speed_of_sound;
  p.gain_cap_db = gain_cap_db;
  p.bin_freqs = bin_freqs;
  const std::size_t nbins = bin_freqs.size();
  p.values.resize(static_cast<std::size_t>(order + 1) * nbins);
  p.multipliers.resize(p.values.size());

  const double cap = std::pow(10.0, gain_cap_db / 20.0);
  const double floor_mag = 1.0 / cap;
  for (int n = 0; n <= order; ++n) {
    for (std::size_t k = 0; k < nbins; ++k) {
      const double wavenumber = 2.0 * kPi * bin_freqs[k] / speed_of_sound;
      const std::complex<double> b = mode_strength(n, wavenumber, g.radius_m, g.baffle);
      const double mag = std::abs(b);
      std::complex<double> mult;
      if (mag == 0.0) {
        mult = {cap, 0.0};  // no phase information to preserve
      } else {
        const std::complex<double> phase = b / mag;
        mult = std::conj(phase) / std::max(mag, floor_mag);
      }
      p.values[static_cast<std::size_t>(n) * nbins + k] = b;
      p.multipliers[static_cast<std::size_t>(n) * nbins + k] = mult;
    }
  }
  return p;
}

void compensate(ShCoefficients& sh, const ModeStrengthProfile& profile) {
  if (profile.order != sh.order) throw std::invalid_argument("profile order mismatch");
  if (profile.bin_freqs.size() != sh.num_bins()) {
    throw std::invalid_argument("profile bins do not align with SH bins");
  }
  for (std::size_t k = 0; k < sh.num_bins(); ++k) {
    if (std::abs(profile.bin_freqs[k] - sh.bin_freqs[k]) > 1e-9) {
      throw std::invalid_argument("profile bin frequencies do not match SH bins");
    }
  }

  const std::size_t nch = sh.num_channels();
  std::vector<int> degree(nch);
  for (std::size_t ch = 0; ch < nch; ++ch) degree[ch] = ShIndexing::degree_of(static_cast<int>(ch));

  for (std::size_t t = 0; t < sh.num_frames; ++t) {
    for (std::size_t k = 0; k < sh.num_bins(); ++k) {
      std::complex<double>* v = sh.vec(t, k);
      for (std::size_t ch = 0; ch < nch; ++ch) {
        v[ch] *= profile.multiplier(degree[ch], k);
      }
    }
  }
}

ShEncoder::ShEncoder(const ArrayGeometry& geometry, int order) : order_(order) {
  validate_geometry(geometry, order);
  basis_ = evaluate_sh_basis(geometry.sensors, order);

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(basis_, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  condition_ = sv(0) / sv(sv.size() - 1);
  if (!(condition_ < 1e6)) {
    throw std::invalid_argument("encoding matrix is rank deficient (condition number " +
                                std::to_string(condition_) + ")");
  }
  Eigen::VectorXd inv_sv = sv.array().inverse();
  pinv_ = svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().adjoint();
}

ShCoefficients ShEncoder::encode(const TfTensor& tf, unsigned workers) const {
  const std::size_t nch_out = static_cast<std::size_t>(pinv_.rows());
  const std::size_t nch_in = static_cast<std::size_t>(pinv_.cols());
  if (tf.num_channels != nch_in) {
    throw std::invalid_argument("channel count does not match sensor count");
  }

  ShCoefficients sh;
  sh.order = order_;
  sh.num_frames = tf.num_frames;
  sh.hop_s = tf.hop / tf.sample_rate;
  sh.bin_hz = tf.bin_hz;
  sh.frame_times = tf.frame_times;
  sh.bin_freqs = tf.bin_freqs;
  sh.data.assign(tf.num_frames * tf.num_bins * nch_out, {});

  parallel_for(workers, tf.num_frames, [&](std::size_t t) {
    Eigen::VectorXcd mic(nch_in);
    for (std::size_t k = 0; k < tf.num_bins; ++k) {
      for (std::size_t c = 0; c < nch_in; ++c) mic(static_cast<Eigen::Index>(c)) = tf.at(c, t, k);
      Eigen::Map<Eigen::VectorXcd> out(sh.vec(t, k), static_cast<Eigen::Index>(nch_out));
      out.noalias() = pinv_ * mic;
    }
  });
  return sh;
}

}  // namespace sspiv
