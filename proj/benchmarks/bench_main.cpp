// Microbenchmarks for the per-TF-bin kernels and the full pipeline.

#include <benchmark/benchmark.h>

#include <random>

#include "sspiv/encoder.hpp"
#include "sspiv/histogram.hpp"
#include "sspiv/pipeline.hpp"
#include "sspiv/simulator.hpp"
#include "sspiv/sspiv.hpp"
#include "sspiv/stft.hpp"

namespace {

sspiv::ArrayGeometry bench_geometry() {
  // 36-sensor spiral layout, enough for order 3 without external files.
  sspiv::ArrayGeometry g;
  g.label = "bench-rigid";
  g.radius_m = 0.042;
  g.baffle = sspiv::Baffle::RigidSphere;
  const int n = 36;
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double incl = sspiv::rad2deg(std::acos(z));
    const double az = std::fmod(137.50776405003785 * i, 360.0);
    g.sensors.emplace_back(az, incl);
  }
  return g;
}

sspiv::ShCoefficients random_sh(std::size_t frames, std::size_t bins, double hop_s,
                                double bin_hz, double f0) {
  sspiv::ShCoefficients sh;
  sh.order = 3;
  sh.num_frames = frames;
  sh.hop_s = hop_s;
  sh.bin_hz = bin_hz;
  sh.frame_times.resize(frames);
  for (std::size_t t = 0; t < frames; ++t) sh.frame_times[t] = t * hop_s;
  sh.bin_freqs.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) sh.bin_freqs[k] = f0 + k * bin_hz;
  sh.data.resize(frames * bins * sh.num_channels());
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 1.0);
  for (auto& v : sh.data) v = {g(rng), g(rng)};
  return sh;
}

void BM_ModeStrengthRigid(benchmark::State& state) {
  double k = 10.0;
  for (auto _ : state) {
    for (int n = 0; n <= 3; ++n) {
      benchmark::DoNotOptimize(sspiv::mode_strength(n, k, 0.042, sspiv::Baffle::RigidSphere));
    }
    k += 1e-6;
  }
}
BENCHMARK(BM_ModeStrengthRigid);

void BM_ShBasis32(benchmark::State& state) {
  const auto g = bench_geometry();
  for (auto _ : state) {
    benchmark::DoNotOptimize(sspiv::evaluate_sh_basis(g.sensors, 3));
  }
}
BENCHMARK(BM_ShBasis32);

void BM_Stft(benchmark::State& state) {
  sspiv::MultichannelSignal sig;
  sig.sample_rate = 48000.0;
  sig.channels.assign(4, std::vector<double>(48000));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> gauss;
  for (auto& ch : sig.channels) {
    for (double& v : ch) v = gauss(rng);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(sspiv::stft(sig, {}, 1));
  }
  state.SetItemsProcessed(state.iterations() * 4 * 997);
}
BENCHMARK(BM_Stft);

void BM_CovarianceRegion(benchmark::State& state) {
  const auto sh = random_sh(64, 2, 0.001, 187.5, 900.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sspiv::covariance(sh, 32, 0, 2, 16));
  }
}
BENCHMARK(BM_CovarianceRegion);

void BM_RegionEigenPiv(benchmark::State& state) {
  const auto sh = random_sh(64, 2, 0.001, 187.5, 900.0);
  const auto R = sspiv::covariance(sh, 32, 0, 2, 16);
  for (auto _ : state) {
    const auto sub = sspiv::principal_subspace(R);
    benchmark::DoNotOptimize(sspiv::piv_from_vector(sub.vector));
  }
}
BENCHMARK(BM_RegionEigenPiv);

void BM_SmoothHistogram(benchmark::State& state) {
  sspiv::PivField field;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss;
  for (int i = 0; i < 20000; ++i) {
    sspiv::PivVote v;
    v.direction = Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng)).normalized();
    field.votes.push_back(v);
  }
  const auto h = sspiv::build_histogram(field);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sspiv::smooth(h, 4.0, 1));
  }
}
BENCHMARK(BM_SmoothHistogram);

void BM_PipelineOneSecond(benchmark::State& state) {
  const auto geometry = bench_geometry();
  sspiv::SceneSpec scene;
  scene.duration_s = 1.0;
  scene.seed = 9;
  scene.snr_db = 20.0;
  sspiv::SourceSpec src;
  src.direction = sspiv::Direction(120.0, 70.0);
  scene.sources.push_back(src);
  const auto sim = sspiv::simulate(scene, geometry, 3, 1);
  sspiv::PipelineConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sspiv::run_estimate(sim.signal, geometry, cfg, static_cast<unsigned>(state.range(0))));
  }
}
BENCHMARK(BM_PipelineOneSecond)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
