#include <doctest.h>

#include <cmath>
#include <complex>
#include <numeric>

#include "sspiv/encoder.hpp"
#include "sspiv/evaluation.hpp"
#include "sspiv/fft.hpp"
#include "sspiv/geometry.hpp"
#include "sspiv/simulator.hpp"
#include "sspiv/stft.hpp"
#include "test_support.hpp"

using namespace sspiv;
namespace ts = testsupport;

namespace {

ArrayGeometry em32() {
  static const ArrayGeometry g = load_geometry(std::string(SSPIV_DATA_DIR) + "/em32.json", 3);
  return g;
}

double power(const std::vector<double>& x) {
  double p = 0.0;
  for (double v : x) p += v * v;
  return p / static_cast<double>(x.size());
}

}  // namespace

TEST_CASE("simulate: deterministic per seed") {
  SceneSpec scene;
  scene.duration_s = 0.2;
  scene.seed = 5;
  scene.snr_db = 10.0;
  SourceSpec s;
  s.direction = Direction(200.0, 80.0);
  s.kind = SignalKind::SpeechLikeBursts;
  scene.sources.push_back(s);

  const SimulationResult a = simulate(scene, em32(), 3, 1);
  const SimulationResult b = simulate(scene, em32(), 3, 2);  // worker count irrelevant
  REQUIRE(a.signal.num_samples() == b.signal.num_samples());
  for (int c = 0; c < 32; ++c) {
    for (std::size_t t = 0; t < a.signal.num_samples(); ++t) {
      CHECK(a.signal.channels[c][t] == b.signal.channels[c][t]);  // bitwise
    }
  }

  scene.seed = 6;
  const SimulationResult c = simulate(scene, em32(), 3, 1);
  double diff = 0.0;
  for (std::size_t t = 0; t < a.signal.num_samples(); ++t) {
    diff += std::abs(a.signal.channels[0][t] - c.signal.channels[0][t]);
  }
  CHECK(diff > 0.0);
}

TEST_CASE("simulate: zero sources at infinite SNR is silence") {
  SceneSpec scene;
  scene.duration_s = 0.1;
  const SimulationResult r = simulate(scene, em32(), 3);
  for (const auto& ch : r.signal.channels) {
    for (double v : ch) CHECK(v == 0.0);
  }
  CHECK(r.truth.empty());
}

TEST_CASE("simulate: validation errors") {
  SceneSpec scene;
  scene.duration_s = 0.0;
  CHECK_THROWS_AS(simulate(scene, em32(), 3), std::invalid_argument);
  scene.duration_s = 0.1;
  CHECK_THROWS_AS(simulate(scene, em32(), 9), std::invalid_argument);  // truncation support
}

TEST_CASE("simulate: antipodal coherent sources cancel the odd degrees") {
  SceneSpec scene;
  scene.duration_s = 0.25;
  scene.seed = 77;
  SourceSpec s1, s2;
  s1.direction = Direction(40.0, 60.0);
  s2.direction = Direction(220.0, 120.0);  // antipode
  s1.kind = s2.kind = SignalKind::BandlimitedNoise;
  s1.signal_seed = 123;
  s2.signal_seed = 123;  // identical signals
  scene.sources = {s1, s2};

  const SimulationResult sim = simulate(scene, em32(), 3);
  const TfTensor tf = stft(sim.signal, {});
  const ShEncoder enc(em32(), 3);
  const ShCoefficients sh = enc.encode(tf);

  double odd = 0.0, even = 0.0;
  for (std::size_t t = 4; t + 4 < sh.num_frames; ++t) {
    for (std::size_t k = 5; k <= 18; ++k) {  // analysis band
      for (int ch = 0; ch < 16; ++ch) {
        const int n = ShIndexing::degree_of(ch);
        const double mag = std::abs(sh.at(ch, t, k));
        if (n % 2 == 1) {
          odd += mag * mag;
        } else {
          even += mag * mag;
        }
      }
    }
  }
  CHECK(odd < 1e-12 * even);
}

TEST_CASE("simulate: sensor transfer matches the scattering-series oracle") {
  // Three steady tones; the per-sensor transfer, demodulated over a windowed
  // mid-signal segment (away from edges and synthesis wrap-around), must
  // match an independent free-field + scattering series evaluated with
  // closed-form Bessel functions and Legendre polynomials.
  const ArrayGeometry g = em32();
  const Direction src(75.0, 60.0);
  const double fs = 48000.0;
  const std::size_t n = 12000;  // 0.25 s
  const std::vector<double> tones = {1001.953125, 2000.98, 3000.0};

  SceneSpec scene;
  scene.duration_s = n / fs;
  scene.seed = 3;
  SourceSpec s;
  s.direction = src;
  s.kind = SignalKind::ToneSet;
  s.tones_hz = tones;
  s.onset_s = -1.0;  // no gate ramps inside the window
  s.offset_s = 2.0;
  scene.sources.push_back(s);
  const SimulationResult sim = simulate(scene, g, 3);

  // Recover the mono source signal by simulating a 1-sensor open sphere of
  // negligible radius: b_0 ~ 4pi j_0(kr) ~ 4pi and Y00 conj(Y00) = 1/(4pi),
  // so the sensor signal equals the source signal up to O((kr)^2).
  ArrayGeometry probe;
  probe.label = "probe";
  probe.radius_m = 1e-9;
  probe.baffle = Baffle::OpenSphere;
  probe.sensors.emplace_back(0.0, 90.0);
  const SimulationResult mono = simulate(scene, probe, 0);

  // Hann-windowed complex demodulation over [t0, t0 + win).
  const std::size_t t0 = 2000, win = 8000;
  auto demod = [&](const std::vector<double>& x, double f) {
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < win; ++i) {
      const double w = 0.5 - 0.5 * std::cos(2.0 * kPi * i / static_cast<double>(win));
      acc += w * x[t0 + i] * std::polar(1.0, -2.0 * kPi * f * (t0 + i) / fs);
    }
    return acc;
  };

  for (std::size_t q : {std::size_t(0), std::size_t(13), std::size_t(27)}) {
    const double cos_delta = unit_vector(g.sensors[q]).dot(unit_vector(src));
    for (double f : tones) {
      const std::complex<double> h_measured =
          demod(sim.signal.channels[q], f) / demod(mono.signal.channels[0], f);
      const double x = 2.0 * kPi * f / 343.0 * g.radius_m;
      std::complex<double> h_ref = 0.0;
      for (int deg = 0; deg <= 3; ++deg) {
        h_ref += ts::ref_mode_strength_rigid(deg, x) * (2.0 * deg + 1.0) /
                 (4.0 * kPi) * ts::legendre_p(deg, cos_delta);
      }
      CHECK(std::abs(h_measured - h_ref) <= 1e-6 * std::abs(h_ref));
    }
  }
}

TEST_CASE("simulate: measured SNR tracks the request within half a dB") {
  SceneSpec clean;
  clean.duration_s = 1.0;
  clean.seed = 8;
  SourceSpec s;
  s.direction = Direction(10.0, 95.0);
  clean.sources.push_back(s);
  const SimulationResult ref = simulate(clean, em32(), 3, 2);

  SceneSpec noisy = clean;
  noisy.snr_db = 15.0;
  const SimulationResult got = simulate(noisy, em32(), 3, 2);

  double p_sig = 0.0, p_noise = 0.0;
  for (int c = 0; c < 32; ++c) {
    p_sig += power(ref.signal.channels[c]);
    std::vector<double> noise(ref.signal.num_samples());
    for (std::size_t t = 0; t < noise.size(); ++t) {
      noise[t] = got.signal.channels[c][t] - ref.signal.channels[c][t];
    }
    p_noise += power(noise);
  }
  const double snr = 10.0 * std::log10(p_sig / p_noise);
  CHECK(snr == doctest::Approx(15.0).epsilon(0.5 / 15.0));
}

TEST_CASE("speech_like_bursts: deterministic, duty-cycled, bandlimited") {
  const double fs = 48000.0;
  const auto a = speech_like_bursts(42, 10.0, fs);
  const auto b = speech_like_bursts(42, 10.0, fs);
  CHECK(a == b);  // bit identical

  for (std::uint64_t seed : {1ULL, 7ULL, 42ULL}) {
    const auto x = speech_like_bursts(seed, 10.0, fs);

    // duty cycle from short-window energy
    const std::size_t win = 480;  // 10 ms
    std::size_t active = 0, total = 0;
    double mean_p = power(x);
    for (std::size_t i = 0; i + win <= x.size(); i += win) {
      double p = 0.0;
      for (std::size_t t = i; t < i + win; ++t) p += x[t] * x[t];
      p /= win;
      if (p > 0.05 * mean_p) ++active;
      ++total;
    }
    const double duty = static_cast<double>(active) / total;
    CHECK(duty >= 0.3);
    CHECK(duty <= 0.7);

    // spectral mass outside 300-3400 Hz at least 40 dB down
    const std::size_t nfft = Fft::next_pow2(x.size());
    Fft fft(nfft);
    std::vector<std::complex<double>> buf(nfft, 0.0), spec(nfft);
    for (std::size_t i = 0; i < x.size(); ++i) buf[i] = x[i];
    fft.forward(buf.data(), spec.data());
    double in_band = 0.0, out_band = 0.0;
    for (std::size_t k = 0; k <= nfft / 2; ++k) {
      const double f = k * fs / static_cast<double>(nfft);
      const double p = std::norm(spec[k]);
      if (f >= 300.0 && f <= 3400.0) {
        in_band += p;
      } else {
        out_band += p;
      }
    }
    CHECK(out_band <= 1e-4 * (in_band + out_band));
  }
}

TEST_CASE("scene JSON: parsing, defaults, and errors") {
  const SceneSpec scene = parse_scene(R"({
    "duration_s": 2.5,
    "seed": 9,
    "snr_db": 12.5,
    "sources": [
      {"az_deg": 10, "incl_deg": 70, "signal": "speech_like_bursts", "level_db": -3,
       "onset_s": 0.5, "offset_s": 2.0},
      {"az_deg": 200, "incl_deg": 110, "signal": "tone_set", "tones_hz": [1000, 2000],
       "signal_seed": 4}
    ]
  })");
  CHECK(scene.duration_s == 2.5);
  CHECK(scene.sample_rate == 48000.0);
  CHECK(scene.snr_db == 12.5);
  REQUIRE(scene.sources.size() == 2);
  CHECK(scene.sources[0].kind == SignalKind::SpeechLikeBursts);
  CHECK(scene.sources[0].level_db == -3.0);
  CHECK(scene.sources[1].tones_hz.size() == 2);
  CHECK(scene.sources[1].signal_seed == 4ULL);

  // snr omitted means noiseless
  CHECK(std::isinf(parse_scene(R"({"duration_s": 1})").snr_db));

  CHECK_THROWS_AS(parse_scene(R"({"duration_s": 0})"), std::runtime_error);
  CHECK_THROWS_AS(parse_scene(R"({"duration_s": 1, "sources": [{"az_deg": 0}]})"),
                  std::runtime_error);
  CHECK_THROWS_AS(parse_scene(R"({"duration_s": 1, "sources": [
      {"az_deg": 0, "incl_deg": 10, "signal": "yodeling"}]})"),
                  std::runtime_error);
  CHECK_THROWS_AS(parse_scene("not json at all"), std::runtime_error);
}

TEST_CASE("truth CSV round-trip") {
  std::vector<TruthRow> rows;
  rows.push_back({1, Direction(30.0, 60.0), 0.0, 10.0});
  rows.push_back({2, Direction(210.5, 100.25), 1.0, 9.0});
  const auto path = ts::temp_dir() / "truth.csv";
  write_truth_csv(path.string(), rows);

  const auto dirs = testsupport::read_file(path);
  CHECK(dirs.starts_with("source_id,az_deg,el_deg,onset_s,offset_s"));

  const auto parsed = read_truth_csv(path.string());
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0].az_deg == doctest::Approx(30.0));
  CHECK(parsed[0].incl_deg == doctest::Approx(60.0));  // el 30 -> incl 60
  CHECK(parsed[1].incl_deg == doctest::Approx(100.25));
}
