#include "sspiv/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace sspiv {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Classic O(n^3) Hungarian algorithm with potentials; returns row -> column.
std::vector<int> hungarian(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

std::vector<int> exhaustive_assignment(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  std::vector<int> perm(n), best(n);
  std::iota(perm.begin(), perm.end(), 0);
  best = perm;
  double best_cost = kInf;
  do {
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += cost[i][perm[i]];
    if (total < best_cost) {
      best_cost = total;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_field(const std::string& s, const std::string& path) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("invalid numeric field '" + s + "' in " + path);
  }
}

Direction direction_from_columns(double az, double el, bool elevation_is_inclination) {
  return elevation_is_inclination ? Direction(az, el)
                                  : Direction::from_azimuth_elevation(az, el);
}

void fill_averages(MetricsReport& r) {
  if (r.matched.empty()) return;
  double az = 0.0, el = 0.0, c = 0.0;
  for (const auto& m : r.matched) {
    az += m.az_err_deg;
    el += m.el_err_deg;
    c += m.combined_deg;
  }
  const double n = static_cast<double>(r.matched.size());
  r.avg_az_deg = az / n;
  r.avg_el_deg = el / n;
  r.avg_combined_deg = c / n;
}

}  // namespace

double azimuth_error_deg(double a_deg, double b_deg) {
  double d = std::fmod(std::abs(a_deg - b_deg), 360.0);
  return std::min(d, 360.0 - d);
}

double elevation_error_deg(const Direction& a, const Direction& b) {
  return std::abs(a.incl_deg - b.incl_deg);
}

double combined_error_deg(const Direction& a, const Direction& b) {
  return great_circle_deg(a, b);
}

MetricsReport match_sources(const std::vector<DoaEstimate>& estimates,
                            const std::vector<Direction>& truths, double gate_deg) {
  const std::size_t ne = estimates.size();
  const std::size_t nt = truths.size();
  MetricsReport report;

  const std::size_t n = std::max(ne, nt);
  if (n > 0) {
    // Rows are estimates, columns truths, padded square. Real costs are
    // capped at the gate so an over-gate pairing never displaces a good one.
    std::vector<std::vector<double>> cost(n, std::vector<double>(n, gate_deg));
    for (std::size_t i = 0; i < ne; ++i) {
      for (std::size_t j = 0; j < nt; ++j) {
        cost[i][j] = std::min(combined_error_deg(estimates[i].direction, truths[j]), gate_deg);
      }
    }
    const std::vector<int> row_to_col = n <= 6 ? exhaustive_assignment(cost) : hungarian(cost);

    std::vector<char> truth_used(nt, 0);
    std::vector<char> est_used(ne, 0);
    for (std::size_t i = 0; i < ne; ++i) {
      const int j = row_to_col[i];
      if (j < 0 || static_cast<std::size_t>(j) >= nt) continue;
      const double combined = combined_error_deg(estimates[i].direction, truths[j]);
      if (combined > gate_deg) continue;
      MatchedPair m;
      m.truth_id = j + 1;
      m.est_rank = static_cast<int>(i) + 1;
      m.az_err_deg = azimuth_error_deg(estimates[i].direction.az_deg, truths[j].az_deg);
      m.el_err_deg = elevation_error_deg(estimates[i].direction, truths[j]);
      m.combined_deg = combined;
      report.matched.push_back(m);
      truth_used[j] = 1;
      est_used[i] = 1;
    }
    for (std::size_t j = 0; j < nt; ++j) {
      if (!truth_used[j]) report.misses.push_back(static_cast<int>(j) + 1);
    }
    for (std::size_t i = 0; i < ne; ++i) {
      if (!est_used[i]) report.false_alarms.push_back(static_cast<int>(i) + 1);
    }
  }
  std::sort(report.matched.begin(), report.matched.end(),
            [](const MatchedPair& a, const MatchedPair& b) { return a.truth_id < b.truth_id; });
  fill_averages(report);
  return report;
}

Summary summarize(std::span<const MetricsReport> reports) {
  Summary s;
  double az = 0.0, el = 0.0, c = 0.0;
  for (const auto& r : reports) {
    s.matched += r.matched.size();
    s.misses += r.misses.size();
    s.false_alarms += r.false_alarms.size();
    for (const auto& m : r.matched) {
      az += m.az_err_deg;
      el += m.el_err_deg;
      c += m.combined_deg;
    }
  }
  if (s.matched > 0) {
    const double n = static_cast<double>(s.matched);
    s.avg_az_deg = az / n;
    s.avg_el_deg = el / n;
    s.avg_combined_deg = c / n;
  }
  return s;
}

std::string render_report_table(const MetricsReport& report) {
  std::ostringstream out;
  char line[160];
  out << "Src #  Azimuth [deg]  Elevation [deg]  Combined [deg]\n";

  std::size_t truth_count = report.misses.size() + report.matched.size();
  for (std::size_t id = 1; id <= truth_count; ++id) {
    const auto it = std::find_if(report.matched.begin(), report.matched.end(),
                                 [&](const MatchedPair& m) {
                                   return m.truth_id == static_cast<int>(id);
                                 });
    if (it != report.matched.end()) {
      std::snprintf(line, sizeof(line), "%-5zu  %13.1f  %15.1f  %14.1f\n", id, it->az_err_deg,
                    it->el_err_deg, it->combined_deg);
    } else {
      std::snprintf(line, sizeof(line), "%-5zu  %13s  %15s  %14s\n", id, "---", "---", "---");
    }
    out << line;
  }
  if (report.avg_az_deg) {
    std::snprintf(line, sizeof(line), "%-5s  %13.1f  %15.1f  %14.1f\n", "Avg", *report.avg_az_deg,
                  *report.avg_el_deg, *report.avg_combined_deg);
  } else {
    std::snprintf(line, sizeof(line), "%-5s  %13s  %15s  %14s\n", "Avg", "---", "---", "---");
  }
  out << line;
  if (!report.false_alarms.empty()) {
    out << "false alarms: " << report.false_alarms.size() << "\n";
  }
  return out.str();
}

void write_report_csv(const std::string& path, const MetricsReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report CSV: " + path);
  out << "source_id,status,az_err_deg,el_err_deg,combined_deg\n";
  char line[160];
  for (const auto& m : report.matched) {
    std::snprintf(line, sizeof(line), "%d,matched,%.4f,%.4f,%.4f\n", m.truth_id, m.az_err_deg,
                  m.el_err_deg, m.combined_deg);
    out << line;
  }
  for (int id : report.misses) out << id << ",miss,,,\n";
  for (int rank : report.false_alarms) out << rank << ",false_alarm,,,\n";
}

std::vector<Direction> read_truth_csv(const std::string& path, bool elevation_is_inclination) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open truth CSV: " + path);
  std::vector<Direction> out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_csv_line(line);
    if (first && !fields.empty() && fields[0] == "source_id") {
      first = false;
      continue;  // header
    }
    first = false;
    if (fields.size() < 3) throw std::runtime_error("truth CSV needs >= 3 columns: " + path);
    const double az = parse_field(fields[1], path);
    const double el = parse_field(fields[2], path);
    try {
      out.push_back(direction_from_columns(az, el, elevation_is_inclination));
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("invalid direction in " + path + ": " + e.what());
    }
  }
  return out;
}

std::vector<DoaEstimate> read_estimates_csv(const std::string& path,
                                            bool elevation_is_inclination) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open estimates CSV: " + path);
  std::vector<DoaEstimate> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;  // format marker lives in a comment
    const auto fields = split_csv_line(line);
    if (!fields.empty() && fields[0] == "rank") continue;  // header
    if (fields.size() < 4) throw std::runtime_error("estimates CSV needs 4 columns: " + path);
    DoaEstimate e;
    e.rank = static_cast<int>(parse_field(fields[0], path));
    const double az = parse_field(fields[1], path);
    const double el = parse_field(fields[2], path);
    try {
      e.direction = direction_from_columns(az, el, elevation_is_inclination);
    } catch (const std::invalid_argument& ex) {
      throw std::runtime_error("invalid direction in " + path + ": " + ex.what());
    }
    e.peak_height = parse_field(fields[3], path);
    out.push_back(e);
  }
  return out;
}

}  // namespace sspiv
