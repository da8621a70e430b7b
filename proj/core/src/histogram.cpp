#include "sspiv/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "sspiv/parallel.hpp"

namespace sspiv {
namespace {

bool divides_evenly(double span, double bin) {
  const double n = span / bin;
  return std::abs(n - std::round(n)) < 1e-9;
}

}  // namespace

SphericalHistogram::SphericalHistogram(double az_bin, double incl_bin) {
  if (!(az_bin > 0.0) || !(incl_bin > 0.0) || !divides_evenly(360.0, az_bin) ||
      !divides_evenly(180.0, incl_bin)) {
    throw std::invalid_argument("histogram bin widths must evenly divide 360 and 180 degrees");
  }
  az_bin_deg = az_bin;
  incl_bin_deg = incl_bin;
  num_az = static_cast<std::size_t>(std::llround(360.0 / az_bin));
  num_incl = static_cast<std::size_t>(std::llround(180.0 / incl_bin));
  grid.assign(num_az * num_incl, 0.0);
}

double SphericalHistogram::sum() const {
  double s = 0.0;
  for (double v : grid) s += v;
  return s;
}

SphericalHistogram build_histogram(const PivField& votes, double az_bin_deg,
                                   double incl_bin_deg) {
  SphericalHistogram h(az_bin_deg, incl_bin_deg);
  for (const auto& v : votes.votes) {
    const Direction d = direction_from_unit(v.direction);
    auto ai = static_cast<std::size_t>(std::floor(d.az_deg / az_bin_deg));
    auto ii = static_cast<std::size_t>(std::floor(d.incl_deg / incl_bin_deg));
    if (ai >= h.num_az) ai = 0;              // azimuth 360 wraps to bin 0
    if (ii >= h.num_incl) ii = h.num_incl - 1;  // inclination 180 stays in the last bin
    h.cell(ai, ii) += v.weight;
    ++h.total_votes;
  }
  return h;
}

SphericalHistogram smooth(const SphericalHistogram& h, double sigma_deg, unsigned workers) {
  if (!(sigma_deg > 0.0)) throw std::invalid_argument("kernel sigma must be > 0");

  const std::size_t naz = h.num_az;
  const std::size_t nincl = h.num_incl;
  const double cutoff = 3.0 * sigma_deg;
  const int row_reach = static_cast<int>(std::ceil(cutoff / h.incl_bin_deg));
  const int max_dk = static_cast<int>(naz / 2);

  // Kernel weights depend only on (row i, row j, |delta az index|), so they
  // are precomputed once per row pair. w = exp(-gc^2 / (2 sigma^2)).
  std::vector<double> cos_incl(nincl), sin_incl(nincl);
  for (std::size_t j = 0; j < nincl; ++j) {
    const double th = deg2rad(h.incl_center(j));
    cos_incl[j] = std::cos(th);
    sin_incl[j] = std::sin(th);
  }
  std::vector<double> cos_daz(static_cast<std::size_t>(max_dk) + 1);
  for (int dk = 0; dk <= max_dk; ++dk) cos_daz[dk] = std::cos(deg2rad(dk * h.az_bin_deg));

  struct RowKernel {
    int j;                       // source row
    std::vector<double> w;      // weight per |delta az index|, 0..dk_max
  };
  std::vector<std::vector<RowKernel>> kernels(nincl);
  std::vector<double> norm(nincl, 0.0);
  const double inv_two_sigma2 = 1.0 / (2.0 * sigma_deg * sigma_deg);

  for (std::size_t i = 0; i < nincl; ++i) {
    for (int j = static_cast<int>(i) - row_reach; j <= static_cast<int>(i) + row_reach; ++j) {
      if (j < 0 || j >= static_cast<int>(nincl)) continue;
      RowKernel rk;
      rk.j = j;
      for (int dk = 0; dk <= max_dk; ++dk) {
        const double c = cos_incl[i] * cos_incl[j] + sin_incl[i] * sin_incl[j] * cos_daz[dk];
        const double gc = rad2deg(std::acos(std::clamp(c, -1.0, 1.0)));
        if (gc > cutoff) break;
        const double w = std::exp(-gc * gc * inv_two_sigma2);
        rk.w.push_back(w);
        const bool once = (dk == 0) || (dk == max_dk && naz % 2 == 0);
        norm[i] += once ? w : 2.0 * w;
      }
      if (!rk.w.empty()) kernels[i].push_back(std::move(rk));
    }
  }

  SphericalHistogram out(h.az_bin_deg, h.incl_bin_deg);
  out.total_votes = h.total_votes;

  parallel_for(workers, nincl, [&](std::size_t i) {
    for (std::size_t k = 0; k < naz; ++k) {
      double acc = 0.0;
      for (const RowKernel& rk : kernels[i]) {
        const double* row = h.grid.data() + static_cast<std::size_t>(rk.j) * naz;
        acc += rk.w[0] * row[k];
        for (std::size_t dk = 1; dk < rk.w.size(); ++dk) {
          const std::size_t kl = (k + naz - dk) % naz;
          const std::size_t kr = (k + dk) % naz;
          if (kl == kr) {
            acc += rk.w[dk] * row[kl];  // antipodal azimuth column counted once
          } else {
            acc += rk.w[dk] * (row[kl] + row[kr]);
          }
        }
      }
      out.cell(k, i) = acc / norm[i];
    }
  });
  return out;
}

std::vector<DoaEstimate> pick_peaks(const SphericalHistogram& h, const PeakParams& p) {
  if (p.max_peaks < 1) throw std::invalid_argument("max_peaks must be >= 1");
  if (!(p.beta > 1.0)) throw std::invalid_argument("beta must be > 1");

  struct Candidate {
    double height;
    std::size_t incl_idx;
    std::size_t az_idx;
  };
  std::vector<Candidate> candidates;

  const auto naz = static_cast<int>(h.num_az);
  for (std::size_t j = 0; j < h.num_incl; ++j) {
    for (std::size_t i = 0; i < h.num_az; ++i) {
      const double v = h.cell(i, j);
      if (!(v > 0.0)) continue;  // a peak needs mass; also makes all-zero grids empty
      bool is_max = true;
      for (int dj = -1; dj <= 1 && is_max; ++dj) {
        const int jj = static_cast<int>(j) + dj;
        if (jj < 0 || jj >= static_cast<int>(h.num_incl)) continue;  // pole rows
        for (int di = -1; di <= 1; ++di) {
          if (di == 0 && dj == 0) continue;
          const int ii = (static_cast<int>(i) + di + naz) % naz;
          if (h.cell(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj)) > v) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) candidates.push_back({v, j, i});
    }
  }

  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.height != b.height) return a.height > b.height;
    if (a.incl_idx != b.incl_idx) return a.incl_idx < b.incl_idx;
    return a.az_idx < b.az_idx;
  });
  if (candidates.size() > static_cast<std::size_t>(p.max_peaks)) {
    candidates.resize(static_cast<std::size_t>(p.max_peaks));
  }

  auto to_estimates = [&](const std::vector<Candidate>& cs) {
    std::vector<DoaEstimate> out;
    out.reserve(cs.size());
    for (std::size_t r = 0; r < cs.size(); ++r) {
      DoaEstimate e;
      e.direction = Direction(h.az_center(cs[r].az_idx), h.incl_center(cs[r].incl_idx));
      e.peak_height = cs[r].height;
      e.rank = static_cast<int>(r) + 1;
      out.push_back(e);
    }
    return out;
  };

  if (candidates.empty()) return {};
  if (p.single_source_mode) return to_estimates({candidates.front()});
  if (candidates.size() < 2) return to_estimates(candidates);

  const double h_min = candidates.back().height;
  std::vector<Candidate> kept;
  for (const auto& c : candidates) {
    if (c.height > p.beta * h_min) kept.push_back(c);
  }
  // When every candidate is within a factor beta of the lowest, the "lowest
  // peak is noise" premise fails; return them all rather than none.
  if (kept.empty()) kept = candidates;
  return to_estimates(kept);
}

void write_histogram_csv(const std::string& path, const SphericalHistogram& raw,
                         const SphericalHistogram& smoothed) {
  if (raw.grid.size() != smoothed.grid.size()) {
    throw std::invalid_argument("raw/smoothed histogram size mismatch");
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write histogram CSV: " + path);
  out << "az_center_deg,incl_center_deg,raw,smoothed\n";
  char line[160];
  for (std::size_t j = 0; j < raw.num_incl; ++j) {
    for (std::size_t i = 0; i < raw.num_az; ++i) {
      std::snprintf(line, sizeof(line), "%.1f,%.1f,%.9g,%.9g\n", raw.az_center(i),
                    raw.incl_center(j), raw.cell(i, j), smoothed.cell(i, j));
      out << line;
    }
  }
}

void write_histogram_pgm(const std::string& path, const SphericalHistogram& h) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write histogram PGM: " + path);
  const double peak = *std::max_element(h.grid.begin(), h.grid.end());
  out << "P5\n" << h.num_az << " " << h.num_incl << "\n255\n";
  for (std::size_t j = 0; j < h.num_incl; ++j) {
    for (std::size_t i = 0; i < h.num_az; ++i) {
      const double v = peak > 0.0 ? h.cell(i, j) / peak : 0.0;
      out.put(static_cast<char>(std::lround(v * 255.0)));
    }
  }
}

}  // namespace sspiv
