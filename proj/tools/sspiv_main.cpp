// sspiv: DOA estimation for spherical microphone arrays.
//
// Subcommands:
//   estimate  WAV in, DOA estimates CSV out
//   simulate  scene JSON in, array WAV + ground-truth CSV out
//   evaluate  estimates CSV vs truth CSV, error table out
//
// Exit codes: 0 ok, 1 I/O error, 2 invalid config/scene, 3 signal/geometry
// channel mismatch.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sspiv/evaluation.hpp"
#include "sspiv/pipeline.hpp"
#include "sspiv/simulator.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitMismatch = 3;

struct EstimateArgs {
  std::string wav_path;
  std::string out_path = "estimates.csv";
  std::string config_path;
  std::string geometry_path;
  std::string dump_histogram_prefix;
  std::string dump_votes_path;
  std::string elevation_convention;
  unsigned threads = 0;
  bool single_source = false;
  bool eigen_weighting = false;
  bool print_config = false;
  std::optional<double> beta;
  std::optional<double> kernel_sigma_deg;
  std::optional<int> max_peaks;
};

int run_estimate_cmd(const EstimateArgs& args) {
  sspiv::PipelineConfig cfg;
  try {
    if (!args.config_path.empty()) cfg = sspiv::load_config_file(args.config_path);
    // flags override the file which overrides the defaults
    if (!args.geometry_path.empty()) cfg.geometry_path = args.geometry_path;
    if (args.single_source) cfg.single_source_mode = true;
    if (args.eigen_weighting) cfg.eigen_weighting = true;
    if (args.beta) cfg.beta = *args.beta;
    if (args.kernel_sigma_deg) cfg.kernel_sigma_deg = *args.kernel_sigma_deg;
    if (args.max_peaks) cfg.max_peaks = *args.max_peaks;
    if (!args.elevation_convention.empty()) cfg.elevation_convention = args.elevation_convention;
    sspiv::validate_config(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  if (args.print_config) {
    std::cout << sspiv::serialize_config(cfg);
    return kExitOk;
  }
  if (args.wav_path.empty()) {
    std::cerr << "error: a WAV input is required\n";
    return kExitIo;
  }

  sspiv::ArrayGeometry geometry;
  sspiv::MultichannelSignal sig;
  try {
    geometry = sspiv::load_geometry(cfg.geometry_path, cfg.sh_order);
    sig = sspiv::read_wav(args.wav_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  if (sig.num_channels() != geometry.num_sensors()) {
    std::cerr << "error: signal has " << sig.num_channels() << " channels but geometry '"
              << geometry.label << "' has " << geometry.num_sensors() << " sensors\n";
    return kExitMismatch;
  }

  try {
    const sspiv::EstimateResult result = sspiv::run_estimate(sig, geometry, cfg, args.threads);
    sspiv::write_estimates_csv(args.out_path, result.estimates, cfg.elevation_convention);
    if (!args.dump_histogram_prefix.empty()) {
      sspiv::write_histogram_csv(args.dump_histogram_prefix + ".csv", result.raw_histogram,
                                 result.smoothed_histogram);
      sspiv::write_histogram_pgm(args.dump_histogram_prefix + ".pgm",
                                 result.smoothed_histogram);
    }
    if (!args.dump_votes_path.empty()) {
      sspiv::write_votes_csv(args.dump_votes_path, result.votes);
    }
    std::cout << "votes: " << result.votes.votes.size() << "\n";
    for (const auto& e : result.estimates) {
      const double vertical = cfg.elevation_convention == "inclination"
                                  ? e.direction.incl_deg
                                  : e.direction.el_deg();
      std::printf("doa %d: az %.1f %s %.1f (height %.4g)\n", e.rank, e.direction.az_deg,
                  cfg.elevation_convention == "inclination" ? "incl" : "el", vertical,
                  e.peak_height);
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

int run_simulate_cmd(const std::string& scene_path, const std::string& geometry_path,
                     const std::string& out_wav, const std::string& truth_path, int order,
                     unsigned threads) {
  sspiv::SceneSpec scene;
  sspiv::ArrayGeometry geometry;
  try {
    scene = sspiv::load_scene(scene_path);
    geometry = sspiv::load_geometry(geometry_path, order);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  try {
    const sspiv::SimulationResult result = sspiv::simulate(scene, geometry, order, threads);
    sspiv::write_wav_float32(out_wav, result.signal);
    const std::string truth =
        truth_path.empty() ? out_wav.substr(0, out_wav.find_last_of('.')) + "_truth.csv"
                           : truth_path;
    sspiv::write_truth_csv(truth, result.truth);
    std::cout << "wrote " << out_wav << " (" << result.signal.num_channels() << " ch, "
              << result.signal.duration_s() << " s) and " << truth << "\n";
    return kExitOk;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

int run_evaluate_cmd(const std::string& est_path, const std::string& truth_path,
                     double gate_deg, const std::string& report_path,
                     const std::string& elevation_convention) {
  try {
    const bool as_incl = elevation_convention == "inclination";
    const auto estimates = sspiv::read_estimates_csv(est_path, as_incl);
    const auto truths = sspiv::read_truth_csv(truth_path, as_incl);
    const sspiv::MetricsReport report = sspiv::match_sources(estimates, truths, gate_deg);
    std::cout << sspiv::render_report_table(report);
    if (!report_path.empty()) sspiv::write_report_csv(report_path, report);
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DOA estimation on rigid-sphere microphone arrays"};
  app.require_subcommand(1);

  EstimateArgs est;
  CLI::App* cmd_est = app.add_subcommand("estimate", "estimate DOAs from a WAV recording");
  cmd_est->add_option("wav", est.wav_path, "multichannel WAV input (optional with --print-config)");
  cmd_est->add_option("-o,--out", est.out_path, "estimates CSV path");
  cmd_est->add_option("-c,--config", est.config_path, "config file");
  cmd_est->add_option("--geometry", est.geometry_path, "geometry JSON (overrides config)");
  cmd_est->add_option("--threads", est.threads, "worker threads (0 = all cores)");
  cmd_est->add_flag("--single-source", est.single_source, "keep only the largest peak");
  cmd_est->add_flag("--eigen-weighting", est.eigen_weighting,
                    "weight votes by eigenvalue ratio");
  cmd_est->add_option("--beta", est.beta, "peak height ratio threshold");
  cmd_est->add_option("--kernel-sigma-deg", est.kernel_sigma_deg, "smoothing kernel std");
  cmd_est->add_option("--max-peaks", est.max_peaks, "initial peak count");
  cmd_est->add_option("--dump-histogram", est.dump_histogram_prefix,
                      "write <prefix>.csv and <prefix>.pgm histogram dumps");
  cmd_est->add_option("--dump-votes", est.dump_votes_path, "write per-region votes CSV");
  cmd_est->add_option("--elevation-convention", est.elevation_convention,
                      "elevation|inclination for reported angles")
      ->check(CLI::IsMember({"elevation", "inclination"}));
  cmd_est->add_flag("--print-config", est.print_config, "print effective config and exit");

  std::string sim_scene, sim_geometry, sim_wav, sim_truth;
  int sim_order = 3;
  unsigned sim_threads = 0;
  CLI::App* cmd_sim = app.add_subcommand("simulate", "synthesize an array recording");
  cmd_sim->add_option("scene", sim_scene, "scene JSON")->required();
  cmd_sim->add_option("geometry", sim_geometry, "geometry JSON")->required();
  cmd_sim->add_option("out_wav", sim_wav, "output WAV (32-bit float)")->required();
  cmd_sim->add_option("--truth", sim_truth, "ground-truth CSV (default <out>_truth.csv)");
  cmd_sim->add_option("--order", sim_order, "synthesis SH order");
  cmd_sim->add_option("--threads", sim_threads, "worker threads (0 = all cores)");

  std::string eval_est, eval_truth, eval_report, eval_convention = "elevation";
  double eval_gate = 20.0;
  CLI::App* cmd_eval = app.add_subcommand("evaluate", "score estimates against ground truth");
  cmd_eval->add_option("estimates", eval_est, "estimates CSV")->required();
  cmd_eval->add_option("truth", eval_truth, "ground-truth CSV")->required();
  cmd_eval->add_option("--gate-deg", eval_gate, "association gate in degrees");
  cmd_eval->add_option("--report", eval_report, "write report CSV here");
  cmd_eval->add_option("--elevation-convention", eval_convention,
                       "elevation|inclination for the el columns")
      ->check(CLI::IsMember({"elevation", "inclination"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (cmd_est->parsed()) return run_estimate_cmd(est);
  if (cmd_sim->parsed()) {
    return run_simulate_cmd(sim_scene, sim_geometry, sim_wav, sim_truth, sim_order, sim_threads);
  }
  return run_evaluate_cmd(eval_est, eval_truth, eval_gate, eval_report, eval_convention);
}
