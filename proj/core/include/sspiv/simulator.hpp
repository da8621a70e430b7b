#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sspiv/geometry.hpp"
#include "sspiv/signal.hpp"

namespace sspiv {

enum class SignalKind { ToneSet, BandlimitedNoise, SpeechLikeBursts };

struct SourceSpec {
  Direction direction;
  SignalKind kind = SignalKind::BandlimitedNoise;
  double level_db = 0.0;
  double onset_s = 0.0;
  double offset_s = -1.0;  // < 0 means "until the end"
  double band_lo_hz = 800.0;   // BandlimitedNoise band
  double band_hi_hz = 3500.0;
  std::vector<double> tones_hz;     // ToneSet frequencies; defaults if empty
  std::optional<std::uint64_t> signal_seed;  // share to make sources coherent
};

struct SceneSpec {
  std::vector<SourceSpec> sources;
  double snr_db = std::numeric_limits<double>::infinity();  // sensor noise
  double duration_s = 0.0;
  double sample_rate = 48000.0;
  std::uint64_t seed = 0;
};

struct TruthRow {
  int source_id = 0;  // 1-based
  Direction direction;
  double onset_s = 0.0;
  double offset_s = 0.0;
};

struct SimulationResult {
  MultichannelSignal signal;
  std::vector<TruthRow> truth;
};

/// Anechoic plane-wave synthesis on the array: per source the sensor
/// spectrum is sum_n b_n(kr) sum_m conj(Y_n^m(src)) Y_n^m(sensor) S(f),
/// truncated at the given order and inverse-transformed. White Gaussian
/// sensor noise is added at snr_db relative to the mixture power.
/// Deterministic for a fixed scene seed, independent of worker count.
SimulationResult simulate(const SceneSpec& scene, const ArrayGeometry& geometry, int order,
                          unsigned workers = 1);

/// Bandlimited (300-3400 Hz) noise gated by random 50-400 ms on/off
/// envelopes with 10 ms cosine ramps. Unit RMS before gating.
std::vector<double> speech_like_bursts(std::uint64_t seed, double duration_s,
                                       double sample_rate);

/// Scene JSON: {"duration_s":..., "sample_rate":..., "seed":..., "snr_db":
/// number|"inf", "sources":[{"az_deg":..., "incl_deg":..., "signal":
/// "tone_set"|"bandlimited_noise"|"speech_like_bursts", ...}]}
SceneSpec load_scene(const std::string& path);
SceneSpec parse_scene(const std::string& json_text);

/// Ground-truth sidecar: source_id,az_deg,el_deg,onset_s,offset_s.
void write_truth_csv(const std::string& path, const std::vector<TruthRow>& rows);

}  // namespace sspiv
