#pragma once

#include <string>
#include <vector>

#include "sspiv/evaluation.hpp"
#include "sspiv/geometry.hpp"
#include "sspiv/histogram.hpp"
#include "sspiv/signal.hpp"
#include "sspiv/sspiv.hpp"

namespace sspiv {

/// Full pipeline configuration. The defaults are the reference operating
/// point; a config file only needs to list deviations from it.
struct PipelineConfig {
  double frame_ms = 4.0;
  double overlap_pct = 75.0;
  int sh_order = 3;
  double cov_time_ms = 16.0;
  double cov_freq_hz = 350.0;
  double f_min_hz = 800.0;
  double f_max_hz = 3500.0;
  double az_bin_deg = 2.0;
  double incl_bin_deg = 2.0;
  double kernel_sigma_deg = 4.0;
  double beta = 2.0;
  int max_peaks = 10;
  double gain_cap_db = 20.0;
  double speed_of_sound = 343.0;
  bool single_source_mode = false;
  bool eigen_weighting = false;
  std::string geometry_path = "data/em32.json";
  std::string elevation_convention = "elevation";  // or "inclination"

  bool operator==(const PipelineConfig&) const = default;
};

/// Parses `key = value` lines ('#' comments). Unknown keys and malformed
/// values are errors; the result is validated.
PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config_file(const std::string& path);

/// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const PipelineConfig& c);

void validate_config(const PipelineConfig& c);

struct EstimateResult {
  std::vector<DoaEstimate> estimates;
  SphericalHistogram raw_histogram;
  SphericalHistogram smoothed_histogram;
  PivField votes;
  std::size_t num_frames = 0;
};

/// Signal in, DOA estimates out: STFT, SH encoding with mode-strength
/// compensation, SSPIV votes, smoothed histogram, peak picking. The signal
/// channel count must equal the geometry sensor count. Deterministic for
/// fixed inputs, independent of the worker count.
EstimateResult run_estimate(const MultichannelSignal& sig, const ArrayGeometry& geometry,
                            const PipelineConfig& cfg, unsigned workers = 0);

/// Estimates CSV (versioned): rank,az_deg,el_deg,peak_height. The el
/// column follows cfg.elevation_convention.
void write_estimates_csv(const std::string& path, const std::vector<DoaEstimate>& estimates,
                         const std::string& elevation_convention);
std::string format_estimates_csv(const std::vector<DoaEstimate>& estimates,
                                 const std::string& elevation_convention);

}  // namespace sspiv
