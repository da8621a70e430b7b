#include "sspiv/simulator.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "sspiv/fft.hpp"
#include "sspiv/parallel.hpp"
#include "sspiv/sh_basis.hpp"

namespace sspiv {
namespace {

constexpr int kMaxSimOrder = 8;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 step keeps per-stream engines decorrelated
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Brickwall bandpass with raised-cosine transitions placed inside the band.
void bandpass_inplace(std::vector<double>& x, double sample_rate, double lo_hz, double hi_hz,
                      double transition_hz) {
  const std::size_t n = x.size();
  const std::size_t nfft = Fft::next_pow2(std::max<std::size_t>(n, 16));
  Fft fft(nfft);
  std::vector<std::complex<double>> buf(nfft, 0.0), spec(nfft);
  for (std::size_t i = 0; i < n; ++i) buf[i] = x[i];
  fft.forward(buf.data(), spec.data());

  auto gain = [&](double f) -> double {
    if (f < lo_hz || f > hi_hz) return 0.0;
    if (f < lo_hz + transition_hz) {
      return 0.5 - 0.5 * std::cos(kPi * (f - lo_hz) / transition_hz);
    }
    if (f > hi_hz - transition_hz) {
      return 0.5 - 0.5 * std::cos(kPi * (hi_hz - f) / transition_hz);
    }
    return 1.0;
  };
  const double bin_hz = sample_rate / static_cast<double>(nfft);
  spec[0] = 0.0;
  for (std::size_t k = 1; k <= nfft / 2; ++k) {
    const double g = gain(k * bin_hz);
    spec[k] *= g;
    if (k != nfft / 2) spec[nfft - k] *= g;
  }
  fft.inverse(spec.data(), buf.data());
  for (std::size_t i = 0; i < n; ++i) x[i] = buf[i].real() / static_cast<double>(nfft);
}

void normalize_rms(std::vector<double>& x) {
  double p = 0.0;
  for (double v : x) p += v * v;
  p = std::sqrt(p / std::max<std::size_t>(1, x.size()));
  if (p > 0.0) {
    for (double& v : x) v /= p;
  }
}

std::vector<double> white_noise(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> x(n);
  for (double& v : x) v = gauss(rng);
  return x;
}

std::vector<double> tone_set_signal(std::uint64_t seed, std::size_t n, double sample_rate,
                                    const std::vector<double>& tones) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 2.0 * kPi);
  std::vector<double> x(n, 0.0);
  for (double f : tones) {
    const double phase = uni(rng);
    const double w = 2.0 * kPi * f / sample_rate;
    for (std::size_t i = 0; i < n; ++i) x[i] += std::cos(w * i + phase);
  }
  normalize_rms(x);
  return x;
}

std::vector<double> source_signal(const SourceSpec& s, std::uint64_t seed, std::size_t n,
                                  double sample_rate) {
  switch (s.kind) {
    case SignalKind::ToneSet: {
      std::vector<double> tones = s.tones_hz;
      if (tones.empty()) tones = {950.0, 1450.0, 2150.0, 2950.0};
      return tone_set_signal(seed, n, sample_rate, tones);
    }
    case SignalKind::BandlimitedNoise: {
      auto x = white_noise(seed, n);
      bandpass_inplace(x, sample_rate, s.band_lo_hz, s.band_hi_hz, 50.0);
      normalize_rms(x);
      return x;
    }
    case SignalKind::SpeechLikeBursts:
      return speech_like_bursts(seed, n / sample_rate, sample_rate);
  }
  throw std::logic_error("unknown signal kind");
}

// Multiplies by the activity gate [onset, offset) with short cosine ramps.
void apply_gate(std::vector<double>& x, double sample_rate, double onset_s, double offset_s) {
  const double ramp_s = 0.005;
  const std::size_t n = x.size();
  const double off = offset_s < 0.0 ? n / sample_rate : offset_s;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = i / sample_rate;
    double g = 0.0;
    if (t >= onset_s && t < off) {
      g = 1.0;
      if (t < onset_s + ramp_s) g = 0.5 - 0.5 * std::cos(kPi * (t - onset_s) / ramp_s);
      if (t > off - ramp_s) g = std::min(g, 0.5 - 0.5 * std::cos(kPi * (off - t) / ramp_s));
    }
    x[i] *= g;
  }
}

}  // namespace

std::vector<double> speech_like_bursts(std::uint64_t seed, double duration_s,
                                       double sample_rate) {
  const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
  auto x = white_noise(mix_seed(seed, 0xA11D10), n);
  bandpass_inplace(x, sample_rate, 300.0, 3400.0, 50.0);
  normalize_rms(x);

  // Alternating on/off segments, 50-400 ms each. Each on segment carries
  // 10 ms raised-cosine ramps at its edges; off segments stay exactly zero.
  std::mt19937_64 rng(mix_seed(seed, 0xE47E10));
  std::uniform_real_distribution<double> seg(0.050, 0.400);
  const double ramp = 0.010 * sample_rate;
  std::vector<double> env(n, 0.0);
  bool on = std::uniform_int_distribution<int>(0, 1)(rng) == 1;
  std::size_t pos = 0;
  while (pos < n) {
    const auto len = static_cast<std::size_t>(seg(rng) * sample_rate);
    const std::size_t end = std::min(n, pos + len);
    if (on) {
      for (std::size_t i = pos; i < end; ++i) {
        double g = 1.0;
        const double from_start = static_cast<double>(i - pos);
        const double to_end = static_cast<double>(end - 1 - i);
        if (from_start < ramp) g = 0.5 - 0.5 * std::cos(kPi * from_start / ramp);
        if (to_end < ramp) g = std::min(g, 0.5 - 0.5 * std::cos(kPi * to_end / ramp));
        env[i] = g;
      }
    }
    pos = end;
    on = !on;
  }
  for (std::size_t i = 0; i < n; ++i) x[i] *= env[i];
  return x;
}

SimulationResult simulate(const SceneSpec& scene, const ArrayGeometry& geometry, int order,
                          unsigned workers) {
  if (!(scene.duration_s > 0.0)) throw std::invalid_argument("scene duration must be > 0");
  if (!(scene.sample_rate > 0.0)) throw std::invalid_argument("sample rate must be > 0");
  if (order < 0 || order > kMaxSimOrder) {
    throw std::invalid_argument("order exceeds simulator truncation support");
  }
  validate_geometry(geometry, order);

  const auto n = static_cast<std::size_t>(std::llround(scene.duration_s * scene.sample_rate));
  const std::size_t nfft = Fft::next_pow2(std::max<std::size_t>(n, 16));
  const std::size_t nbins = nfft / 2 + 1;
  const std::size_t num_sensors = geometry.sensors.size();
  const std::size_t num_sources = scene.sources.size();

  SimulationResult result;
  result.signal.sample_rate = scene.sample_rate;
  result.signal.channels.assign(num_sensors, std::vector<double>(n, 0.0));
  for (std::size_t s = 0; s < num_sources; ++s) {
    TruthRow row;
    row.source_id = static_cast<int>(s) + 1;
    row.direction = scene.sources[s].direction;
    row.onset_s = scene.sources[s].onset_s;
    row.offset_s = scene.sources[s].offset_s < 0.0 ? scene.duration_s
                                                   : scene.sources[s].offset_s;
    result.truth.push_back(row);
  }

  // Source spectra.
  Fft fft(nfft);
  std::vector<std::vector<std::complex<double>>> source_spec(num_sources);
  for (std::size_t s = 0; s < num_sources; ++s) {
    const SourceSpec& spec = scene.sources[s];
    const std::uint64_t sig_seed =
        mix_seed(scene.seed, spec.signal_seed.value_or(static_cast<std::uint64_t>(s)));
    std::vector<double> x = source_signal(spec, sig_seed, n, scene.sample_rate);
    apply_gate(x, scene.sample_rate, spec.onset_s, spec.offset_s);
    const double gain = std::pow(10.0, spec.level_db / 20.0);
    std::vector<std::complex<double>> buf(nfft, 0.0);
    for (std::size_t i = 0; i < n; ++i) buf[i] = gain * x[i];
    source_spec[s].resize(nfft);
    fft.forward(buf.data(), source_spec[s].data());
  }

  // Geometry couplings G[s][q][n] = sum_m conj(Y_n^m(src)) Y_n^m(sensor).
  const Eigen::MatrixXcd sensor_basis = evaluate_sh_basis(geometry.sensors, order);
  std::vector<std::vector<std::array<std::complex<double>, kMaxSimOrder + 1>>> coupling(
      num_sources);
  for (std::size_t s = 0; s < num_sources; ++s) {
    const Eigen::VectorXcd src = sh_vector(scene.sources[s].direction, order).conjugate();
    coupling[s].resize(num_sensors);
    for (std::size_t q = 0; q < num_sensors; ++q) {
      for (int deg = 0; deg <= order; ++deg) {
        std::complex<double> acc = 0.0;
        for (int m = -deg; m <= deg; ++m) {
          const int idx = ShIndexing::flat(deg, m);
          acc += src(idx) * sensor_basis(static_cast<Eigen::Index>(q), idx);
        }
        coupling[s][q][static_cast<std::size_t>(deg)] = acc;
      }
    }
  }

  // Mode strengths per bin, shared across sensors and sources.
  std::vector<std::complex<double>> bn(static_cast<std::size_t>(order + 1) * nbins);
  parallel_for(workers, nbins, [&](std::size_t k) {
    const double f = k * scene.sample_rate / static_cast<double>(nfft);
    const double wavenumber = 2.0 * kPi * f / 343.0;
    for (int deg = 0; deg <= order; ++deg) {
      bn[static_cast<std::size_t>(deg) * nbins + k] =
          mode_strength(deg, wavenumber, geometry.radius_m, geometry.baffle);
    }
  });

  // Per sensor: accumulate spectra over sources, enforce conjugate symmetry,
  // inverse transform. Sensors are independent, so this parallelizes with
  // deterministic output.
  parallel_for(workers, num_sensors, [&](std::size_t q) {
    std::vector<std::complex<double>> spec(nfft, 0.0), buf(nfft);
    for (std::size_t s = 0; s < num_sources; ++s) {
      const auto& g = coupling[s][q];
      for (std::size_t k = 0; k <= nfft / 2; ++k) {
        std::complex<double> h = 0.0;
        for (int deg = 0; deg <= order; ++deg) {
          h += bn[static_cast<std::size_t>(deg) * nbins + k] * g[static_cast<std::size_t>(deg)];
        }
        spec[k] += h * source_spec[s][k];
      }
    }
    for (std::size_t k = 1; k < nfft / 2; ++k) spec[nfft - k] = std::conj(spec[k]);
    spec[nfft / 2] = spec[nfft / 2].real();
    fft.inverse(spec.data(), buf.data());
    double* out = result.signal.channels[q].data();
    for (std::size_t i = 0; i < n; ++i) out[i] = buf[i].real() / static_cast<double>(nfft);
  });

  // Sensor noise at snr_db relative to the mean mixture power.
  if (std::isfinite(scene.snr_db)) {
    double power = 0.0;
    for (const auto& ch : result.signal.channels) {
      for (double v : ch) power += v * v;
    }
    power /= static_cast<double>(num_sensors * std::max<std::size_t>(1, n));
    const double sigma = std::sqrt(power * std::pow(10.0, -scene.snr_db / 10.0));
    if (sigma > 0.0) {
      parallel_for(workers, num_sensors, [&](std::size_t q) {
        std::mt19937_64 rng(mix_seed(scene.seed, 0x4015E000ULL + q));
        std::normal_distribution<double> gauss(0.0, sigma);
        for (double& v : result.signal.channels[q]) v += gauss(rng);
      });
    }
  }
  return result;
}

SceneSpec parse_scene(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("scene parse error: ") + e.what());
  }

  SceneSpec scene;
  try {
    scene.duration_s = j.at("duration_s").get<double>();
    scene.sample_rate = j.value("sample_rate", 48000.0);
    scene.seed = j.value("seed", 0ULL);
    if (j.contains("snr_db") && j["snr_db"].is_number()) {
      scene.snr_db = j["snr_db"].get<double>();
    }
    for (const auto& s : j.value("sources", nlohmann::json::array())) {
      SourceSpec src;
      src.direction = Direction(s.at("az_deg").get<double>(), s.at("incl_deg").get<double>());
      const std::string kind = s.value("signal", std::string("bandlimited_noise"));
      if (kind == "tone_set") {
        src.kind = SignalKind::ToneSet;
      } else if (kind == "bandlimited_noise") {
        src.kind = SignalKind::BandlimitedNoise;
      } else if (kind == "speech_like_bursts") {
        src.kind = SignalKind::SpeechLikeBursts;
      } else {
        throw std::runtime_error("unknown signal kind: " + kind);
      }
      src.level_db = s.value("level_db", 0.0);
      src.onset_s = s.value("onset_s", 0.0);
      src.offset_s = s.value("offset_s", -1.0);
      if (s.contains("band_hz")) {
        src.band_lo_hz = s["band_hz"].at(0).get<double>();
        src.band_hi_hz = s["band_hz"].at(1).get<double>();
      }
      if (s.contains("tones_hz")) {
        for (const auto& f : s["tones_hz"]) src.tones_hz.push_back(f.get<double>());
      }
      if (s.contains("signal_seed")) src.signal_seed = s["signal_seed"].get<std::uint64_t>();
      scene.sources.push_back(std::move(src));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("scene schema error: ") + e.what());
  }
  if (!(scene.duration_s > 0.0)) throw std::runtime_error("scene duration must be > 0");
  return scene;
}

SceneSpec load_scene(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open scene file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scene(buf.str());
}

void write_truth_csv(const std::string& path, const std::vector<TruthRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write truth CSV: " + path);
  out << "source_id,az_deg,el_deg,onset_s,offset_s\n";
  char line[160];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%d,%.6f,%.6f,%.3f,%.3f\n", r.source_id,
                  r.direction.az_deg, r.direction.el_deg(), r.onset_s, r.offset_s);
    out << line;
  }
}

}  // namespace sspiv
