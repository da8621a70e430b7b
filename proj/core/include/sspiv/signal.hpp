#pragma once

#include <string>
#include <vector>

namespace sspiv {

/// Multichannel time-domain audio. All channels have equal length.
struct MultichannelSignal {
  std::vector<std::vector<double>> channels;
  double sample_rate = 0.0;

  int num_channels() const { return static_cast<int>(channels.size()); }
  std::size_t num_samples() const { return channels.empty() ? 0 : channels[0].size(); }
  double duration_s() const { return num_samples() / sample_rate; }
};

void validate_signal(const MultichannelSignal& sig);

/// Reads a RIFF WAV file. Supported codecs: integer PCM (16/24/32 bit) and
/// 32-bit IEEE float, including the WAVE_FORMAT_EXTENSIBLE wrapping. Integer
/// samples are scaled to [-1, 1] by 2^(bits-1).
MultichannelSignal read_wav(const std::string& path);

/// Writes a 32-bit float WAV file.
void write_wav_float32(const std::string& path, const MultichannelSignal& sig);

}  // namespace sspiv
