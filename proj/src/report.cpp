#include "mansa/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "mansa/text_format.hpp"

namespace mansa {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

const char* const kMetricsHeader =
    "step,episode,seed,eval_return,cl_calls_cum,cl_call_pct,budget_remaining,epsilon,temperature";
const char* const kHeatmapHeader = "state_key,x,y,activations,visits,rate";

}  // namespace

void write_metrics_csv(std::ostream& out, std::span<const MetricsRecord> records) {
  out << kMetricsHeader << '\n';
  for (const auto& r : records) {
    out << r.step << ',' << r.episode << ',' << r.seed << ',' << format_double(r.eval_return) << ','
        << r.cl_calls_cum << ',' << format_double(r.cl_call_pct) << ',' << r.budget_remaining << ','
        << format_double(r.epsilon) << ',' << format_double(r.temperature) << '\n';
  }
}

std::vector<MetricsRecord> read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) {
    throw ConfigError("metrics csv: unexpected header");
  }
  std::vector<MetricsRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 9) throw ConfigError("metrics csv: expected 9 columns");
    try {
      out.push_back({std::stoull(f[0]), std::stoull(f[1]), std::stoull(f[2]), std::stod(f[3]),
                     std::stoull(f[4]), std::stod(f[5]), std::stoll(f[6]), std::stod(f[7]),
                     std::stod(f[8])});
    } catch (const std::exception&) {
      throw ConfigError("metrics csv: malformed row '" + line + "'");
    }
  }
  return out;
}

std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  return read_metrics_csv(in);
}

void write_heatmap_csv(std::ostream& out, std::span<const HeatmapRow> rows) {
  out << kHeatmapHeader << '\n';
  for (const auto& r : rows) {
    out << r.state_key << ',' << r.x << ',' << r.y << ',' << r.activations << ',' << r.visits << ','
        << format_double(r.rate) << '\n';
  }
}

std::vector<HeatmapRow> read_heatmap_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line;
  if (!in || !std::getline(in, line) || line != kHeatmapHeader) {
    throw ConfigError("heatmap csv: cannot read '" + path.string() + "'");
  }
  std::vector<HeatmapRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 6) throw ConfigError("heatmap csv: expected 6 columns");
    rows.push_back({std::stoull(f[0]), std::stoi(f[1]), std::stoi(f[2]), std::stoull(f[3]),
                    std::stoull(f[4]), std::stod(f[5])});
  }
  return rows;
}

std::vector<HeatmapRow> merge_heatmaps(const std::vector<std::vector<HeatmapRow>>& runs) {
  std::map<StateKey, HeatmapRow> merged;
  for (const auto& run : runs) {
    for (const auto& r : run) {
      auto [it, fresh] = merged.try_emplace(r.state_key, r);
      if (!fresh) {
        it->second.activations += r.activations;
        it->second.visits += r.visits;
      }
    }
  }
  std::vector<HeatmapRow> out;
  for (auto& [k, r] : merged) {
    r.rate = r.visits == 0 ? 0.0 : static_cast<double>(r.activations) / r.visits;
    out.push_back(r);
  }
  return out;
}

std::vector<CurvePoint> aggregate(const std::vector<std::vector<MetricsRecord>>& runs) {
  if (runs.size() < 2) throw ConfigError("aggregate: need at least two runs for an interval");
  const auto& first = runs.front();
  for (const auto& run : runs) {
    if (run.size() != first.size()) throw ConfigError("aggregate: runs have different lengths");
    for (std::size_t i = 0; i < run.size(); ++i) {
      if (run[i].step != first[i].step) throw ConfigError("aggregate: evaluation steps are misaligned");
    }
  }
  const double k = static_cast<double>(runs.size());
  std::vector<CurvePoint> curve;
  for (std::size_t i = 0; i < first.size(); ++i) {
    double mean = 0.0;
    for (const auto& run : runs) mean += run[i].eval_return;
    mean /= k;
    double ss = 0.0;
    for (const auto& run : runs) ss += (run[i].eval_return - mean) * (run[i].eval_return - mean);
    const double sd = std::sqrt(ss / (k - 1.0));
    curve.push_back({first[i].step, mean, 1.96 * sd / std::sqrt(k), static_cast<int>(runs.size())});
  }
  return curve;
}

std::vector<CurvePoint> aggregate_run_dirs(const std::vector<std::filesystem::path>& dirs) {
  std::vector<std::vector<MetricsRecord>> runs;
  for (const auto& d : dirs) runs.push_back(read_metrics_csv(d / "metrics.csv"));
  return aggregate(runs);
}

void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve) {
  out << "step,mean,ci_low,ci_high,runs\n";
  for (const auto& p : curve) {
    out << p.step << ',' << format_double(p.mean) << ',' << format_double(p.mean - p.half_width) << ','
        << format_double(p.mean + p.half_width) << ',' << p.runs << '\n';
  }
}

double failure_rate(std::span<const double> final_scores, double threshold) {
  if (final_scores.empty()) throw ConfigError("failure_rate: no scores");
  const auto failed = std::count_if(final_scores.begin(), final_scores.end(),
                                    [threshold](double s) { return s < threshold; });
  return static_cast<double>(failed) / static_cast<double>(final_scores.size());
}

std::vector<std::filesystem::path> find_run_dirs(const std::filesystem::path& root) {
  std::vector<std::filesystem::path> dirs;
  if (!std::filesystem::is_directory(root)) return dirs;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().filename() == "metrics.csv") {
      dirs.push_back(entry.path().parent_path());
    }
  }
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

}  // namespace mansa
