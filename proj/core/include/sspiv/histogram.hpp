#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sspiv/direction.hpp"
#include "sspiv/sspiv.hpp"

namespace sspiv {

/// 2-D direction histogram over azimuth x inclination, with cell centers at
/// ((i + 0.5) az_bin, (j + 0.5) incl_bin). Azimuth wraps; inclination does
/// not. Cell (i, j) is stored at grid[j * num_az + i].
struct SphericalHistogram {
  double az_bin_deg = 2.0;
  double incl_bin_deg = 2.0;
  std::size_t num_az = 180;
  std::size_t num_incl = 90;
  std::int64_t total_votes = 0;
  std::vector<double> grid;

  SphericalHistogram() = default;
  SphericalHistogram(double az_bin, double incl_bin);

  double& cell(std::size_t az_idx, std::size_t incl_idx) {
    return grid[incl_idx * num_az + az_idx];
  }
  double cell(std::size_t az_idx, std::size_t incl_idx) const {
    return grid[incl_idx * num_az + az_idx];
  }
  double az_center(std::size_t az_idx) const { return (az_idx + 0.5) * az_bin_deg; }
  double incl_center(std::size_t incl_idx) const { return (incl_idx + 0.5) * incl_bin_deg; }
  double sum() const;
};

struct PeakParams {
  int max_peaks = 10;
  double beta = 2.0;              // height ratio threshold, > 1
  double kernel_sigma_deg = 4.0;  // solid-angle Gaussian std
  bool single_source_mode = false;
};

struct DoaEstimate {
  Direction direction;
  double peak_height = 0.0;
  int rank = 0;  // 1 = highest peak
};

/// Accumulates vote directions into cells. Azimuth exactly 360 after
/// conversion wraps to bin 0; inclination exactly 180 lands in the last bin.
SphericalHistogram build_histogram(const PivField& votes, double az_bin_deg = 2.0,
                                   double incl_bin_deg = 2.0);

/// Gaussian smoothing in great-circle angle between cell centers, truncated
/// at 3 sigma and normalized per output cell (a weighted average, so the
/// output is bounded by the input range and has no pole-area bias).
SphericalHistogram smooth(const SphericalHistogram& h, double sigma_deg, unsigned workers = 1);

/// Local maxima (8-neighborhood, azimuth wraps, pole rows use the neighbors
/// that exist, cells must be > 0), ranked by height with (incl index, az
/// index) tie-breaks. The max_peaks highest are candidates; peaks taller
/// than beta times the lowest candidate are kept. If no candidate passes
/// (all within a factor beta) every candidate is returned. Single-source
/// mode returns just the top peak.
std::vector<DoaEstimate> pick_peaks(const SphericalHistogram& h, const PeakParams& p);

/// CSV dump with columns az_center,incl_center,raw,smoothed.
void write_histogram_csv(const std::string& path, const SphericalHistogram& raw,
                         const SphericalHistogram& smoothed);

/// 8-bit PGM image of the grid (rows = inclination, columns = azimuth),
/// scaled to the histogram maximum.
void write_histogram_pgm(const std::string& path, const SphericalHistogram& h);

}  // namespace sspiv
