#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "sspiv/signal.hpp"
#include "test_support.hpp"

using namespace sspiv;
namespace ts = testsupport;

namespace {

// Minimal PCM16 writer for crafting reader fixtures.
std::string make_pcm16_wav(const std::vector<std::vector<std::int16_t>>& chans, int rate) {
  const std::size_t n = chans[0].size();
  const std::size_t nch = chans.size();
  const std::uint32_t data_len = static_cast<std::uint32_t>(n * nch * 2);
  std::string s;
  auto u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  };
  auto u16 = [&](std::uint16_t v) {
    s.push_back(static_cast<char>(v & 0xFF));
    s.push_back(static_cast<char>(v >> 8));
  };
  s += "RIFF";
  u32(36 + data_len);
  s += "WAVEfmt ";
  u32(16);
  u16(1);
  u16(static_cast<std::uint16_t>(nch));
  u32(static_cast<std::uint32_t>(rate));
  u32(static_cast<std::uint32_t>(rate * nch * 2));
  u16(static_cast<std::uint16_t>(nch * 2));
  u16(16);
  s += "data";
  u32(data_len);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t c = 0; c < nch; ++c) u16(static_cast<std::uint16_t>(chans[c][t]));
  }
  return s;
}

}  // namespace

TEST_CASE("wav: float32 round-trip preserves header and samples") {
  MultichannelSignal sig;
  sig.sample_rate = 48000.0;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> uni(-0.9, 0.9);
  sig.channels.assign(32, std::vector<double>(480));
  for (auto& ch : sig.channels) {
    for (double& v : ch) v = uni(rng);
  }

  const auto path = (ts::temp_dir() / "roundtrip.wav").string();
  write_wav_float32(path, sig);
  const MultichannelSignal back = read_wav(path);
  CHECK(back.num_channels() == 32);
  CHECK(back.sample_rate == doctest::Approx(48000.0));
  CHECK(back.num_samples() == 480);
  double worst = 0.0;
  for (int c = 0; c < 32; ++c) {
    for (std::size_t t = 0; t < 480; ++t) {
      worst = std::max(worst, std::abs(back.channels[c][t] - sig.channels[c][t]));
    }
  }
  CHECK(worst < 1e-7);  // float32 quantization
}

TEST_CASE("wav: 16-bit full-scale square wave hits 32767/32768") {
  std::vector<std::int16_t> ch(64);
  for (std::size_t i = 0; i < ch.size(); ++i) {
    ch[i] = (i % 8 < 4) ? std::int16_t(32767) : std::int16_t(-32768);
  }
  const auto path = ts::temp_dir() / "square.wav";
  ts::write_file(path, make_pcm16_wav({ch}, 16000));

  const MultichannelSignal sig = read_wav(path.string());
  double max_abs = 0.0, max_pos = 0.0;
  for (double v : sig.channels[0]) {
    max_abs = std::max(max_abs, std::abs(v));
    max_pos = std::max(max_pos, v);
  }
  CHECK(max_pos == doctest::Approx(32767.0 / 32768.0));
  CHECK(max_abs <= 1.0);
}

TEST_CASE("wav: corrupt and truncated inputs are rejected") {
  const auto bad = ts::temp_dir() / "bad.wav";
  ts::write_file(bad, "THIS IS NOT A WAV FILE AT ALL........");
  CHECK_THROWS_AS(read_wav(bad.string()), std::runtime_error);

  std::vector<std::int16_t> ch(32, 1000);
  std::string wav = make_pcm16_wav({ch}, 8000);
  const auto trunc = ts::temp_dir() / "trunc.wav";
  ts::write_file(trunc, wav.substr(0, 30));  // cut inside the fmt chunk
  CHECK_THROWS_AS(read_wav(trunc.string()), std::runtime_error);

  CHECK_THROWS_AS(read_wav((ts::temp_dir() / "missing.wav").string()), std::runtime_error);
}

TEST_CASE("signal validation") {
  MultichannelSignal sig;
  sig.sample_rate = 48000.0;
  sig.channels = {{0.0, 1.0}, {0.0}};
  CHECK_THROWS_AS(validate_signal(sig), std::invalid_argument);
  sig.channels = {};
  CHECK_THROWS_AS(validate_signal(sig), std::invalid_argument);
}
