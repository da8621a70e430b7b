#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sspiv/direction.hpp"
#include "sspiv/histogram.hpp"

namespace sspiv {

/// Wrapped azimuth difference, degrees in [0, 180].
double azimuth_error_deg(double a_deg, double b_deg);

/// Absolute inclination/elevation difference (the two coincide).
double elevation_error_deg(const Direction& a, const Direction& b);

/// Great-circle ("combined solid angle") error in degrees.
double combined_error_deg(const Direction& a, const Direction& b);

struct MatchedPair {
  int truth_id = 0;   // 1-based index into the truth list
  int est_rank = 0;   // 1-based index into the estimate list
  double az_err_deg = 0.0;
  double el_err_deg = 0.0;
  double combined_deg = 0.0;
};

struct MetricsReport {
  std::vector<MatchedPair> matched;
  std::vector<int> misses;        // truth ids with no estimate
  std::vector<int> false_alarms;  // estimate ranks with no truth
  std::optional<double> avg_az_deg;
  std::optional<double> avg_el_deg;
  std::optional<double> avg_combined_deg;
};

/// Optimal one-to-one association between estimates and truths minimizing
/// total combined error (costs capped at the gate). Pairs whose combined
/// error exceeds gate_deg are broken into a miss and a false alarm.
/// Exhaustive search for up to 6 sources, Hungarian beyond.
MetricsReport match_sources(const std::vector<DoaEstimate>& estimates,
                            const std::vector<Direction>& truths, double gate_deg = 20.0);

struct Summary {
  std::size_t matched = 0;
  std::size_t misses = 0;
  std::size_t false_alarms = 0;
  std::optional<double> avg_az_deg;
  std::optional<double> avg_el_deg;
  std::optional<double> avg_combined_deg;
};

/// Unweighted means over all matched pairs pooled across reports; misses
/// are excluded from the averages and reported as counts.
Summary summarize(std::span<const MetricsReport> reports);

/// Fixed-width text table with one row per truth source (misses rendered
/// as ---), false alarm rows, and an Avg row.
std::string render_report_table(const MetricsReport& report);

/// CSV rows: source_id,status,az_err_deg,el_err_deg,combined_deg
/// where status is matched|miss|false_alarm (error columns empty otherwise).
void write_report_csv(const std::string& path, const MetricsReport& report);

/// Reads a truth CSV (source_id,az_deg,el_deg[,onset_s,offset_s]).
/// elevation_is_inclination selects how the el column is interpreted.
std::vector<Direction> read_truth_csv(const std::string& path,
                                      bool elevation_is_inclination = false);

/// Reads an estimates CSV written by the pipeline (rank,az_deg,el_deg,peak_height).
std::vector<DoaEstimate> read_estimates_csv(const std::string& path,
                                            bool elevation_is_inclination = false);

}  // namespace sspiv
