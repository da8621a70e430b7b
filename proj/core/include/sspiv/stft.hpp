#pragma once

#include <complex>
#include <vector>

#include "sspiv/signal.hpp"

namespace sspiv {

enum class Window { PeriodicHann, Rectangular };

struct StftParams {
  double frame_ms = 4.0;
  double overlap_pct = 75.0;  // one of {0, 50, 75}
  Window window = Window::PeriodicHann;
};

/// One-sided STFT coefficients, indexed (channel, frame, bin). Frames are
/// windowed, zero-padded to fft_len (next power of two >= frame_len) and
/// transformed without normalization. Bin k sits at k * sample_rate/fft_len.
struct TfTensor {
  std::size_t num_channels = 0;
  std::size_t num_frames = 0;
  std::size_t num_bins = 0;  // fft_len/2 + 1
  std::size_t frame_len = 0;
  std::size_t hop = 0;
  std::size_t fft_len = 0;
  double sample_rate = 0.0;
  double bin_hz = 0.0;
  std::vector<double> frame_times;  // frame centers, seconds
  std::vector<double> bin_freqs;    // Hz
  std::vector<std::complex<double>> data;  // [channel][frame][bin]

  std::complex<double>& at(std::size_t c, std::size_t t, std::size_t k) {
    return data[(c * num_frames + t) * num_bins + k];
  }
  const std::complex<double>& at(std::size_t c, std::size_t t, std::size_t k) const {
    return data[(c * num_frames + t) * num_bins + k];
  }
};

/// Window samples for a frame of the given length.
std::vector<double> make_window(Window w, std::size_t frame_len);

/// Frame geometry implied by params at a sample rate: frame_len is the
/// nearest even sample count of frame_ms, hop follows from the overlap.
struct FrameLayout {
  std::size_t frame_len;
  std::size_t hop;
  std::size_t fft_len;
};
FrameLayout frame_layout(const StftParams& p, double sample_rate);

/// Analysis STFT over the whole signal. Frames are anchored at sample
/// t * hop; a trailing partial frame is dropped. Throws if the signal is
/// shorter than one frame.
TfTensor stft(const MultichannelSignal& sig, const StftParams& p, unsigned workers = 1);

/// STFT of frames [first_frame, first_frame + frame_count) of the signal,
/// bit-identical to the corresponding slice of the full transform.
TfTensor stft_range(const MultichannelSignal& sig, const StftParams& p,
                    std::size_t first_frame, std::size_t frame_count, unsigned workers = 1);

/// Total frame count for a signal length, floor((samples - frame_len)/hop) + 1.
std::size_t stft_frame_count(std::size_t samples, const FrameLayout& fl);

}  // namespace sspiv
