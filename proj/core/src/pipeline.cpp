#include "sspiv/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "sspiv/encoder.hpp"
#include "sspiv/parallel.hpp"
#include "sspiv/stft.hpp"

namespace sspiv {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("config: invalid number for " + key + ": '" + value + "'");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  const double v = parse_double(key, value);
  if (v != std::floor(v)) throw std::runtime_error("config: " + key + " must be an integer");
  return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::runtime_error("config: " + key + " must be true or false");
}

}  // namespace

void validate_config(const PipelineConfig& c) {
  auto fail = [](const std::string& msg) { throw std::runtime_error("config: " + msg); };
  if (!(c.frame_ms > 0.0)) fail("frame_ms must be > 0");
  if (c.overlap_pct != 0.0 && c.overlap_pct != 50.0 && c.overlap_pct != 75.0) {
    fail("overlap_pct must be one of 0, 50, 75");
  }
  if (c.sh_order < 1) fail("sh_order must be >= 1");
  if (!(c.cov_time_ms > 0.0) || !(c.cov_freq_hz > 0.0)) fail("covariance spans must be > 0");
  if (!(c.f_min_hz < c.f_max_hz)) fail("f_min_hz must be < f_max_hz");
  if (!(c.f_min_hz > 0.0)) fail("f_min_hz must be > 0");
  if (!(c.beta > 1.0)) fail("beta must be > 1");
  if (c.max_peaks < 1) fail("max_peaks must be >= 1");
  if (!(c.kernel_sigma_deg > 0.0)) fail("kernel_sigma_deg must be > 0");
  const double naz = 360.0 / c.az_bin_deg;
  const double nincl = 180.0 / c.incl_bin_deg;
  if (!(c.az_bin_deg > 0.0) || std::abs(naz - std::round(naz)) > 1e-9) {
    fail("az_bin_deg must evenly divide 360");
  }
  if (!(c.incl_bin_deg > 0.0) || std::abs(nincl - std::round(nincl)) > 1e-9) {
    fail("incl_bin_deg must evenly divide 180");
  }
  if (!(c.gain_cap_db >= 0.0)) fail("gain_cap_db must be >= 0");
  if (!(c.speed_of_sound > 0.0)) fail("speed_of_sound must be > 0");
  if (c.elevation_convention != "elevation" && c.elevation_convention != "inclination") {
    fail("elevation_convention must be elevation or inclination");
  }
}

PipelineConfig parse_config(const std::string& text) {
  PipelineConfig c;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config: line " + std::to_string(line_no) + " is not key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "frame_ms") c.frame_ms = parse_double(key, value);
    else if (key == "overlap_pct") c.overlap_pct = parse_double(key, value);
    else if (key == "sh_order") c.sh_order = parse_int(key, value);
    else if (key == "cov_time_ms") c.cov_time_ms = parse_double(key, value);
    else if (key == "cov_freq_hz") c.cov_freq_hz = parse_double(key, value);
    else if (key == "f_min_hz") c.f_min_hz = parse_double(key, value);
    else if (key == "f_max_hz") c.f_max_hz = parse_double(key, value);
    else if (key == "az_bin_deg") c.az_bin_deg = parse_double(key, value);
    else if (key == "incl_bin_deg") c.incl_bin_deg = parse_double(key, value);
    else if (key == "kernel_sigma_deg") c.kernel_sigma_deg = parse_double(key, value);
    else if (key == "beta") c.beta = parse_double(key, value);
    else if (key == "max_peaks") c.max_peaks = parse_int(key, value);
    else if (key == "gain_cap_db") c.gain_cap_db = parse_double(key, value);
    else if (key == "speed_of_sound") c.speed_of_sound = parse_double(key, value);
    else if (key == "single_source_mode") c.single_source_mode = parse_bool(key, value);
    else if (key == "eigen_weighting") c.eigen_weighting = parse_bool(key, value);
    else if (key == "geometry") c.geometry_path = value;
    else if (key == "elevation_convention") c.elevation_convention = value;
    else throw std::runtime_error("config: unknown key '" + key + "'");
  }
  validate_config(c);
  return c;
}

PipelineConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const PipelineConfig& c) {
  std::ostringstream out;
  out << "frame_ms = " << format_double(c.frame_ms) << "\n"
      << "overlap_pct = " << format_double(c.overlap_pct) << "\n"
      << "sh_order = " << c.sh_order << "\n"
      << "cov_time_ms = " << format_double(c.cov_time_ms) << "\n"
      << "cov_freq_hz = " << format_double(c.cov_freq_hz) << "\n"
      << "f_min_hz = " << format_double(c.f_min_hz) << "\n"
      << "f_max_hz = " << format_double(c.f_max_hz) << "\n"
      << "az_bin_deg = " << format_double(c.az_bin_deg) << "\n"
      << "incl_bin_deg = " << format_double(c.incl_bin_deg) << "\n"
      << "kernel_sigma_deg = " << format_double(c.kernel_sigma_deg) << "\n"
      << "beta = " << format_double(c.beta) << "\n"
      << "max_peaks = " << c.max_peaks << "\n"
      << "gain_cap_db = " << format_double(c.gain_cap_db) << "\n"
      << "speed_of_sound = " << format_double(c.speed_of_sound) << "\n"
      << "single_source_mode = " << (c.single_source_mode ? "true" : "false") << "\n"
      << "eigen_weighting = " << (c.eigen_weighting ? "true" : "false") << "\n"
      << "geometry = " << c.geometry_path << "\n"
      << "elevation_convention = " << c.elevation_convention << "\n";
  return out.str();
}

EstimateResult run_estimate(const MultichannelSignal& sig, const ArrayGeometry& geometry,
                            const PipelineConfig& cfg, unsigned workers) {
  validate_config(cfg);
  validate_signal(sig);
  workers = resolve_workers(workers);
  if (sig.num_channels() != geometry.num_sensors()) {
    throw std::invalid_argument("signal has " + std::to_string(sig.num_channels()) +
                                " channels but the geometry has " +
                                std::to_string(geometry.num_sensors()) + " sensors");
  }

  StftParams stft_params{cfg.frame_ms, cfg.overlap_pct, Window::PeriodicHann};
  const FrameLayout fl = frame_layout(stft_params, sig.sample_rate);
  const std::size_t total_frames = stft_frame_count(sig.num_samples(), fl);
  if (total_frames == 0) throw std::invalid_argument("signal shorter than one STFT frame");

  const ShEncoder encoder(geometry, cfg.sh_order);

  // Only bins inside the analysis band feed the covariance stage; keeping
  // just those makes a 10 s recording a few tens of MB instead of hundreds.
  const double native_bin_hz = sig.sample_rate / static_cast<double>(fl.fft_len);
  std::size_t keep_lo = fl.fft_len / 2 + 1, keep_hi = 0;
  for (std::size_t k = 0; k <= fl.fft_len / 2; ++k) {
    const double f = k * native_bin_hz;
    if (f >= cfg.f_min_hz && f <= cfg.f_max_hz) {
      keep_lo = std::min(keep_lo, k);
      keep_hi = std::max(keep_hi, k + 1);
    }
  }
  if (keep_hi <= keep_lo) {
    throw std::invalid_argument("no STFT bins inside [f_min_hz, f_max_hz]");
  }
  const std::size_t kept_bins = keep_hi - keep_lo;

  ShCoefficients sh;
  sh.order = cfg.sh_order;
  sh.num_frames = total_frames;
  sh.hop_s = fl.hop / sig.sample_rate;
  sh.bin_hz = native_bin_hz;
  sh.frame_times.resize(total_frames);
  sh.bin_freqs.resize(kept_bins);
  for (std::size_t k = 0; k < kept_bins; ++k) sh.bin_freqs[k] = (keep_lo + k) * native_bin_hz;
  sh.data.assign(total_frames * kept_bins * sh.num_channels(), {});

  ModeStrengthProfile profile = make_mode_strength_profile(
      geometry, cfg.sh_order, sh.bin_freqs, cfg.speed_of_sound, cfg.gain_cap_db);

  const std::size_t block_frames = 1024;
  for (std::size_t t0 = 0; t0 < total_frames; t0 += block_frames) {
    const std::size_t count = std::min(block_frames, total_frames - t0);
    TfTensor tf = stft_range(sig, stft_params, t0, count, workers);

    // Drop out-of-band bins before encoding; only the analysis band feeds
    // the covariance stage.
    TfTensor sliced;
    sliced.num_channels = tf.num_channels;
    sliced.num_frames = tf.num_frames;
    sliced.num_bins = kept_bins;
    sliced.frame_len = tf.frame_len;
    sliced.hop = tf.hop;
    sliced.fft_len = tf.fft_len;
    sliced.sample_rate = tf.sample_rate;
    sliced.bin_hz = tf.bin_hz;
    sliced.frame_times = tf.frame_times;
    sliced.bin_freqs.assign(tf.bin_freqs.begin() + static_cast<std::ptrdiff_t>(keep_lo),
                            tf.bin_freqs.begin() + static_cast<std::ptrdiff_t>(keep_hi));
    sliced.data.resize(tf.num_channels * count * kept_bins);
    for (std::size_t c = 0; c < tf.num_channels; ++c) {
      for (std::size_t t = 0; t < count; ++t) {
        std::copy_n(&tf.at(c, t, keep_lo), kept_bins, &sliced.at(c, t, 0));
      }
    }

    ShCoefficients block = encoder.encode(sliced, workers);
    for (std::size_t t = 0; t < count; ++t) {
      sh.frame_times[t0 + t] = block.frame_times[t];
      std::copy_n(block.vec(t, 0), kept_bins * sh.num_channels(), sh.vec(t0 + t, 0));
    }
  }
  compensate(sh, profile);

  EstimateResult result;
  result.num_frames = total_frames;
  SmoothingParams smoothing{cfg.cov_time_ms, cfg.cov_freq_hz, cfg.f_min_hz, cfg.f_max_hz};
  result.votes = compute_sspiv_field(sh, smoothing, cfg.eigen_weighting, workers);
  result.raw_histogram = build_histogram(result.votes, cfg.az_bin_deg, cfg.incl_bin_deg);
  result.smoothed_histogram = smooth(result.raw_histogram, cfg.kernel_sigma_deg, workers);
  PeakParams peaks{cfg.max_peaks, cfg.beta, cfg.kernel_sigma_deg, cfg.single_source_mode};
  result.estimates = pick_peaks(result.smoothed_histogram, peaks);
  return result;
}

std::string format_estimates_csv(const std::vector<DoaEstimate>& estimates,
                                 const std::string& elevation_convention) {
  const bool as_incl = elevation_convention == "inclination";
  std::ostringstream out;
  out << "# sspiv-estimates v1\n";
  out << "rank,az_deg," << (as_incl ? "incl_deg" : "el_deg") << ",peak_height\n";
  char line[160];
  for (const auto& e : estimates) {
    const double vertical = as_incl ? e.direction.incl_deg : e.direction.el_deg();
    std::snprintf(line, sizeof(line), "%d,%.4f,%.4f,%.6g\n", e.rank, e.direction.az_deg,
                  vertical, e.peak_height);
    out << line;
  }
  return out.str();
}

void write_estimates_csv(const std::string& path, const std::vector<DoaEstimate>& estimates,
                         const std::string& elevation_convention) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write estimates CSV: " + path);
  out << format_estimates_csv(estimates, elevation_convention);
}

}  // namespace sspiv
