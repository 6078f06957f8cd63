#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mansa/run_config.hpp"

namespace mansa {

enum class SweepParameter { alpha, switching_cost, budget_fraction };

/// Throws ConfigError for anything but alpha / switching_cost / budget_fraction.
SweepParameter parse_sweep_parameter(const std::string& name);
std::string to_string(SweepParameter p);

struct SweepRow {
  double value = 0.0;
  std::uint64_t seed = 0;
  double final_return = 0.0;
  std::uint64_t cl_calls = 0;
  double cl_call_pct = 0.0;
  std::int64_t budget = -1;  // activation budget used for the row, -1 if unbudgeted
};

/// The config with `parameter` set to `value`. budget_fraction needs the
/// reference run's CL call count.
RunConfig with_parameter(RunConfig config, SweepParameter parameter, double value,
                         std::uint64_t reference_cl_calls = 0);

/// One training run per (value, seed). For budget_fraction, each seed first
/// trains an unbudgeted reference run and the budget is
/// floor(fraction * reference CL calls). Runs are independent and may execute
/// on `threads` workers; rows come back sorted by (value, seed). When
/// `out_dir` is given each run is written to <out_dir>/<param>=<value>/seed=<s>.
std::vector<SweepRow> sweep(const RunConfig& config, SweepParameter parameter,
                            std::span<const double> values, int threads = 1,
                            const std::optional<std::filesystem::path>& out_dir = std::nullopt);

/// Columns: value,seed,final_return,cl_calls,cl_call_pct,budget
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace mansa
