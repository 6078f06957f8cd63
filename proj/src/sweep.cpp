#include "mansa/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include "mansa/text_format.hpp"
#include "mansa/trainer.hpp"

namespace mansa {
namespace {

// Runs jobs[0..n) on up to `threads` workers; rethrows the first failure.
template <class Job>
void run_parallel(std::size_t n, int threads, Job job) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const int count = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int k = 0; k < count; ++k) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

SweepParameter parse_sweep_parameter(const std::string& name) {
  if (name == "alpha") return SweepParameter::alpha;
  if (name == "switching_cost") return SweepParameter::switching_cost;
  if (name == "budget_fraction") return SweepParameter::budget_fraction;
  throw ConfigError("unknown sweep parameter '" + name + "'");
}

std::string to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::alpha: return "alpha";
    case SweepParameter::switching_cost: return "switching_cost";
    case SweepParameter::budget_fraction: return "budget_fraction";
  }
  return "?";
}

RunConfig with_parameter(RunConfig config, SweepParameter parameter, double value,
                         std::uint64_t reference_cl_calls) {
  switch (parameter) {
    case SweepParameter::alpha:
      if (config.env.kind != EnvKind::assurance && config.env.kind != EnvKind::nonmonotonic) {
        throw ConfigError("alpha sweeps need a matrix-game env");
      }
      config.env.alpha = value;
      break;
    case SweepParameter::switching_cost:
      config.global.switching_cost = value;
      break;
    case SweepParameter::budget_fraction:
      if (value < 0.0) throw ConfigError("budget fraction must be non-negative");
      config.budget.enabled = true;
      config.budget.total =
          static_cast<std::int64_t>(std::floor(value * static_cast<double>(reference_cl_calls)));
      break;
  }
  finalize(config);
  return config;
}

std::vector<SweepRow> sweep(const RunConfig& config, SweepParameter parameter,
                            std::span<const double> values, int threads,
                            const std::optional<std::filesystem::path>& out_dir) {
  if (values.empty()) throw ConfigError("sweep: no values given");
  const auto& seeds = config.schedule.seeds;

  std::map<std::uint64_t, std::uint64_t> reference_calls;
  if (parameter == SweepParameter::budget_fraction) {
    std::vector<std::uint64_t> calls(seeds.size());
    RunConfig reference = config;
    reference.budget = {};
    run_parallel(seeds.size(), threads, [&](std::size_t i) {
      RunArtifacts run = train(reference, seeds[i]);
      calls[i] = run.cl_calls;
      if (out_dir) write_run(run, *out_dir / "reference" / ("seed=" + std::to_string(seeds[i])));
    });
    for (std::size_t i = 0; i < seeds.size(); ++i) reference_calls[seeds[i]] = calls[i];
  }

  std::vector<SweepRow> rows(values.size() * seeds.size());
  run_parallel(rows.size(), threads, [&](std::size_t idx) {
    const double value = values[idx / seeds.size()];
    const std::uint64_t seed = seeds[idx % seeds.size()];
    const std::uint64_t ref = reference_calls.count(seed) ? reference_calls.at(seed) : 0;
    RunConfig cfg = with_parameter(config, parameter, value, ref);
    RunArtifacts run = train(cfg, seed);
    rows[idx] = {value, seed, run.final_return(), run.cl_calls, run.cl_call_pct(),
                 cfg.budget.enabled ? cfg.budget.total : -1};
    if (out_dir) {
      write_run(run, *out_dir / (to_string(parameter) + "=" + format_double(value)) /
                         ("seed=" + std::to_string(seed)));
    }
  });
  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return a.value != b.value ? a.value < b.value : a.seed < b.seed;
  });
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "value,seed,final_return,cl_calls,cl_call_pct,budget\n";
  for (const auto& r : rows) {
    out << format_double(r.value) << ',' << r.seed << ',' << format_double(r.final_return) << ','
        << r.cl_calls << ',' << format_double(r.cl_call_pct) << ',' << r.budget << '\n';
  }
}

}  // namespace mansa
