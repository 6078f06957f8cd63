#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "mansa/trainer.hpp"

namespace mansa {

/// Columns: step,episode,seed,eval_return,cl_calls_cum,cl_call_pct,budget_remaining,epsilon,temperature
void write_metrics_csv(std::ostream& out, std::span<const MetricsRecord> records);
std::vector<MetricsRecord> read_metrics_csv(std::istream& in);
std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path& path);

/// Columns: state_key,x,y,activations,visits,rate
void write_heatmap_csv(std::ostream& out, std::span<const HeatmapRow> rows);
std::vector<HeatmapRow> read_heatmap_csv(const std::filesystem::path& path);

/// Sums counts per state across runs and recomputes the rates.
std::vector<HeatmapRow> merge_heatmaps(const std::vector<std::vector<HeatmapRow>>& runs);

struct CurvePoint {
  std::uint64_t step = 0;
  double mean = 0.0;
  double half_width = 0.0;  // 1.96 * sample std / sqrt(k)
  int runs = 0;
};

/// Per evaluation step mean and normal 95% interval of eval_return across runs.
/// Throws ConfigError with fewer than two runs or misaligned steps.
std::vector<CurvePoint> aggregate(const std::vector<std::vector<MetricsRecord>>& runs);
std::vector<CurvePoint> aggregate_run_dirs(const std::vector<std::filesystem::path>& dirs);

/// Columns: step,mean,ci_low,ci_high,runs
void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve);

/// Fraction of tasks whose final score is below `threshold`.
double failure_rate(std::span<const double> final_scores, double threshold);

/// Subdirectories of `root` that hold a metrics.csv, sorted by name.
std::vector<std::filesystem::path> find_run_dirs(const std::filesystem::path& root);

}  // namespace mansa
