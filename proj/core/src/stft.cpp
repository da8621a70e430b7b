#include "sspiv/stft.hpp"

#include <cmath>
#include <stdexcept>

#include "sspiv/direction.hpp"
#include "sspiv/fft.hpp"
#include "sspiv/parallel.hpp"

namespace sspiv {

std::vector<double> make_window(Window w, std::size_t frame_len) {
  std::vector<double> win(frame_len, 1.0);
  if (w == Window::PeriodicHann) {
    for (std::size_t i = 0; i < frame_len; ++i) {
      win[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / frame_len);
    }
  }
  return win;
}

FrameLayout frame_layout(const StftParams& p, double sample_rate) {
  if (!(sample_rate > 0.0)) throw std::invalid_argument("sample rate must be > 0");
  if (p.overlap_pct != 0.0 && p.overlap_pct != 50.0 && p.overlap_pct != 75.0) {
    throw std::invalid_argument("overlap must be one of {0, 50, 75} percent");
  }
  const double exact = p.frame_ms * sample_rate / 1000.0;
  if (exact < 8.0) throw std::invalid_argument("frame shorter than 8 samples");
  const auto frame_len = static_cast<std::size_t>(std::llround(exact / 2.0) * 2);
  const auto hop = static_cast<std::size_t>(
      std::llround(frame_len * (100.0 - p.overlap_pct) / 100.0));
  return {frame_len, hop, Fft::next_pow2(frame_len)};
}

std::size_t stft_frame_count(std::size_t samples, const FrameLayout& fl) {
  if (samples < fl.frame_len) return 0;
  return (samples - fl.frame_len) / fl.hop + 1;
}

TfTensor stft_range(const MultichannelSignal& sig, const StftParams& p,
                    std::size_t first_frame, std::size_t frame_count, unsigned workers) {
  validate_signal(sig);
  const FrameLayout fl = frame_layout(p, sig.sample_rate);
  const std::size_t total = stft_frame_count(sig.num_samples(), fl);
  if (total == 0) throw std::invalid_argument("signal shorter than one STFT frame");
  if (first_frame + frame_count > total) throw std::invalid_argument("frame range out of bounds");

  TfTensor tf;
  tf.num_channels = static_cast<std::size_t>(sig.num_channels());
  tf.num_frames = frame_count;
  tf.num_bins = fl.fft_len / 2 + 1;
  tf.frame_len = fl.frame_len;
  tf.hop = fl.hop;
  tf.fft_len = fl.fft_len;
  tf.sample_rate = sig.sample_rate;
  tf.bin_hz = sig.sample_rate / static_cast<double>(fl.fft_len);
  tf.frame_times.resize(frame_count);
  for (std::size_t t = 0; t < frame_count; ++t) {
    tf.frame_times[t] =
        ((first_frame + t) * fl.hop + fl.frame_len / 2.0) / sig.sample_rate;
  }
  tf.bin_freqs.resize(tf.num_bins);
  for (std::size_t k = 0; k < tf.num_bins; ++k) tf.bin_freqs[k] = k * tf.bin_hz;
  tf.data.assign(tf.num_channels * frame_count * tf.num_bins, {});

  const std::vector<double> win = make_window(p.window, fl.frame_len);
  const Fft fft(fl.fft_len);

  parallel_for(workers, tf.num_channels * frame_count, [&](std::size_t job) {
    const std::size_t c = job / frame_count;
    const std::size_t t = job % frame_count;
    const double* x = sig.channels[c].data() + (first_frame + t) * fl.hop;
    std::vector<std::complex<double>> buf(fl.fft_len, 0.0), spec(fl.fft_len);
    for (std::size_t i = 0; i < fl.frame_len; ++i) buf[i] = win[i] * x[i];
    fft.forward(buf.data(), spec.data());
    std::complex<double>* out = &tf.at(c, t, 0);
    for (std::size_t k = 0; k < tf.num_bins; ++k) out[k] = spec[k];
  });
  return tf;
}

TfTensor stft(const MultichannelSignal& sig, const StftParams& p, unsigned workers) {
  validate_signal(sig);
  const FrameLayout fl = frame_layout(p, sig.sample_rate);
  const std::size_t total = stft_frame_count(sig.num_samples(), fl);
  if (total == 0) throw std::invalid_argument("signal shorter than one STFT frame");
  return stft_range(sig, p, 0, total, workers);
}

}  // namespace sspiv
