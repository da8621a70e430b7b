#include "sspiv/sspiv.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "sspiv/parallel.hpp"

namespace sspiv {

RegionPlan plan_regions(const ShCoefficients& sh, const SmoothingParams& p) {
  if (!(p.f_min_hz < p.f_max_hz)) throw std::invalid_argument("f_min must be < f_max");
  if (!(p.time_span_ms > 0.0) || !(p.freq_span_hz > 0.0)) {
    throw std::invalid_argument("smoothing spans must be > 0");
  }

  RegionPlan plan;
  const double hop_ms = sh.hop_s * 1000.0;
  plan.frames_per_region =
      static_cast<std::size_t>(std::max<long long>(1, std::llround(p.time_span_ms / hop_ms)));
  plan.bins_per_band =
      static_cast<std::size_t>(std::max<long long>(2, std::llround(p.freq_span_hz / sh.bin_hz)));

  std::size_t lo = sh.num_bins(), hi = 0;
  for (std::size_t k = 0; k < sh.num_bins(); ++k) {
    if (sh.bin_freqs[k] >= p.f_min_hz && sh.bin_freqs[k] <= p.f_max_hz) {
      lo = std::min(lo, k);
      hi = std::max(hi, k + 1);
    }
  }
  const std::size_t in_band = (hi > lo) ? hi - lo : 0;
  plan.first_bin = lo;
  plan.num_bands = in_band / plan.bins_per_band;
  plan.band_center_hz.resize(plan.num_bands);
  for (std::size_t b = 0; b < plan.num_bands; ++b) {
    double sum = 0.0;
    for (std::size_t k = 0; k < plan.bins_per_band; ++k) {
      sum += sh.bin_freqs[plan.band_begin(b) + k];
    }
    plan.band_center_hz[b] = sum / static_cast<double>(plan.bins_per_band);
  }
  return plan;
}

Eigen::MatrixXcd covariance(const ShCoefficients& sh, std::size_t t_center,
                            std::size_t first_bin, std::size_t bins, std::size_t frames) {
  const std::size_t nch = sh.num_channels();
  if (bins == 0 || frames == 0) throw std::invalid_argument("empty covariance region");
  if (first_bin + bins > sh.num_bins()) throw std::invalid_argument("bin range out of bounds");

  const std::size_t back = (frames - 1) / 2;
  if (t_center < back || t_center - back + frames > sh.num_frames) {
    throw std::invalid_argument("fewer than L frames available around the region center");
  }
  const std::size_t t0 = t_center - back;

  Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(nch),
                                              static_cast<Eigen::Index>(nch));
  for (std::size_t t = t0; t < t0 + frames; ++t) {
    for (std::size_t k = first_bin; k < first_bin + bins; ++k) {
      Eigen::Map<const Eigen::VectorXcd> a(sh.vec(t, k), static_cast<Eigen::Index>(nch));
      R.selfadjointView<Eigen::Lower>().rankUpdate(a, 1.0);
    }
  }
  R /= static_cast<double>(frames * bins);
  R.triangularView<Eigen::StrictlyUpper>() = R.adjoint();
  return R;
}

PrincipalSubspace principal_subspace(const Eigen::MatrixXcd& R) {
  if (!R.allFinite()) throw std::runtime_error("covariance has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(R);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigen decomposition failed");

  const Eigen::Index last = R.rows() - 1;
  PrincipalSubspace out;
  out.vector = es.eigenvectors().col(last);
  const double trace = es.eigenvalues().sum();
  out.eigenvalue_ratio = trace > 0.0 ? es.eigenvalues()(last) / trace : 0.0;

  // Make the phase deterministic: zeroth-order component real and >= 0.
  const std::complex<double> u0 = out.vector(0);
  const double mag = std::abs(u0);
  if (mag > 1e-14) out.vector *= std::conj(u0) / mag;
  return out;
}

std::optional<Eigen::Vector3d> piv_from_vector(const Eigen::VectorXcd& u) {
  if (u.size() < 4) throw std::invalid_argument("need at least order-1 coefficients");
  const std::complex<double> w = std::conj(u(0));
  const std::complex<double> um = u(1);  // (n, m) = (1, -1)
  const std::complex<double> u0 = u(2);  // (1, 0)
  const std::complex<double> up = u(3);  // (1, +1)

  // Fixed map from degree-1 complex SH to Cartesian dipole components,
  // pinned by the plane-wave invariant (a wave from Omega points at Omega).
  const std::complex<double> i_unit(0.0, 1.0);
  Eigen::Vector3d intensity;
  intensity.x() = (w * (um - up)).real();
  intensity.y() = (w * (-i_unit * (um + up))).real();
  intensity.z() = (w * (std::sqrt(2.0) * u0)).real();

  const double norm = intensity.norm();
  if (norm < 1e-12) return std::nullopt;
  return intensity / norm;
}

PivField compute_sspiv_field(const ShCoefficients& sh, const SmoothingParams& p,
                             bool eigen_weighting, unsigned workers) {
  const RegionPlan plan = plan_regions(sh, p);
  PivField field;
  const std::size_t back = (plan.frames_per_region - 1) / 2;
  if (sh.num_frames < plan.frames_per_region || plan.num_bands == 0) return field;

  const std::size_t t_first = back;
  const std::size_t t_last = sh.num_frames - (plan.frames_per_region - back);  // inclusive
  const std::size_t usable = t_last - t_first + 1;

  // Each chunk owns a slice of frames; concatenation preserves (frame, band)
  // order for any worker count.
  const std::size_t chunk_frames = 128;
  const std::size_t num_chunks = (usable + chunk_frames - 1) / chunk_frames;
  std::vector<std::vector<PivVote>> partial(num_chunks);

  parallel_for_chunks(workers, usable, chunk_frames, [&](std::size_t begin, std::size_t end) {
    const std::size_t chunk = begin / chunk_frames;
    std::vector<PivVote>& out = partial[chunk];
    for (std::size_t i = begin; i < end; ++i) {
      const std::size_t t = t_first + i;
      for (std::size_t b = 0; b < plan.num_bands; ++b) {
        const Eigen::MatrixXcd R = covariance(sh, t, plan.band_begin(b), plan.bins_per_band,
                                              plan.frames_per_region);
        const PrincipalSubspace sub = principal_subspace(R);
        const auto dir = piv_from_vector(sub.vector);
        if (!dir) continue;
        PivVote v;
        v.frame = t;
        v.band = b;
        v.time_s = sh.frame_times[t];
        v.band_hz = plan.band_center_hz[b];
        v.direction = *dir;
        v.weight = eigen_weighting ? sub.eigenvalue_ratio : 1.0;
        out.push_back(v);
      }
    }
  });

  std::size_t total = 0;
  for (const auto& part : partial) total += part.size();
  field.votes.reserve(total);
  for (auto& part : partial) {
    field.votes.insert(field.votes.end(), part.begin(), part.end());
  }
  return field;
}

void write_votes_csv(const std::string& path, const PivField& field) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write votes CSV: " + path);
  out << "frame_time_s,band_center_hz,x,y,z,weight\n";
  char line[256];
  for (const auto& v : field.votes) {
    std::snprintf(line, sizeof(line), "%.6f,%.1f,%.9f,%.9f,%.9f,%.9f\n", v.time_s, v.band_hz,
                  v.direction.x(), v.direction.y(), v.direction.z(), v.weight);
    out << line;
  }
}

}  // namespace sspiv
