#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mansa/dp_oracle.hpp"
#include "mansa/report.hpp"
#include "mansa/run_config.hpp"
#include "mansa/sweep.hpp"
#include "mansa/text_format.hpp"
#include "mansa/trainer.hpp"

namespace fs = std::filesystem;
using namespace mansa;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInvariant = 2;

struct TrainArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void run_training(const TrainArgs& args, bool random_switch) {
  RunConfig config = load_run_config(args.config);
  const fs::path out = args.out.empty() ? fs::path(config.output.dir) : fs::path(args.out);
  std::vector<std::uint64_t> seeds = args.seed ? std::vector<std::uint64_t>{*args.seed} : config.schedule.seeds;
  for (std::uint64_t seed : seeds) {
    RunArtifacts run = random_switch ? random_switch_baseline(config, seed) : train(config, seed);
    const fs::path dir = args.seed ? out : out / ("seed=" + std::to_string(seed));
    write_run(run, dir);
    std::cout << "seed=" << seed << " final_return=" << format_double(run.final_return())
              << " cl_calls=" << run.cl_calls << " cl_call_pct=" << format_double(run.cl_call_pct())
              << " dir=" << dir.string() << '\n';
  }
}

void print_row(const char* label, const std::vector<double>& values) {
  std::cout << label;
  for (double v : values) std::cout << ' ' << format_double(v);
  std::cout << '\n';
}

void print_flags(const char* label, const std::vector<bool>& flags) {
  std::cout << label;
  for (bool f : flags) std::cout << ' ' << (f ? 1 : 0);
  std::cout << '\n';
}

void run_oracle(const std::string& path, double c, std::optional<int> budget, double tolerance) {
  const MdpFixture fx = load_mdp_fixture_file(path);
  if (!budget) {
    const SwitchSolution sol = solve_switching(fx.mdp, fx.central, c, tolerance);
    std::cout << "iterations " << sol.iterations << " residual " << format_double(sol.residual) << '\n';
    print_row("values", sol.values);
    print_row("intervention", sol.intervention_values);
    print_flags("activation", sol.activation_set);
    return;
  }
  const BudgetedSolution sol = solve_budgeted(fx.mdp, fx.central, c, *budget, tolerance);
  std::cout << "iterations " << sol.iterations << " residual " << format_double(sol.residual) << '\n';
  for (int x = 0; x <= sol.budget; ++x) {
    const std::string v = "values x=" + std::to_string(x);
    const std::string g = "activation x=" + std::to_string(x);
    print_row(v.c_str(), sol.values[x]);
    print_flags(g.c_str(), sol.activation_set[x]);
  }
}

void run_report(const fs::path& root, bool with_heatmap, std::optional<double> threshold) {
  const std::vector<fs::path> dirs = find_run_dirs(root);
  if (dirs.empty()) throw ConfigError("report: no runs under " + root.string());

  if (dirs.size() >= 2) {
    const auto curve = aggregate_run_dirs(dirs);
    std::ofstream out(root / "aggregate.csv");
    write_curve_csv(out, curve);
    write_curve_csv(std::cout, curve);
  } else {
    std::cerr << "report: one run found, no confidence interval\n";
  }

  if (with_heatmap) {
    std::vector<std::vector<HeatmapRow>> maps;
    for (const auto& d : dirs) maps.push_back(read_heatmap_csv(d / "heatmap.csv"));
    const auto merged = merge_heatmaps(maps);
    std::ofstream out(root / "heatmap.csv");
    write_heatmap_csv(out, merged);
    std::cout << "heatmap " << merged.size() << " states -> " << (root / "heatmap.csv").string() << '\n';
  }

  if (threshold) {
    // Runs of one task share a parent directory (one per seed).
    std::map<fs::path, std::vector<double>> by_task;
    for (const auto& d : dirs) {
      const RunConfig cfg = load_run_config(d / "config.json");
      const auto metrics = read_metrics_csv(d / "metrics.csv");
      if (metrics.empty()) continue;
      by_task[d.parent_path()].push_back(metrics.back().eval_return / achievable_max_return(cfg.env));
    }
    std::vector<double> scores;
    for (const auto& [task, s] : by_task) {
      double mean = 0.0;
      for (double v : s) mean += v;
      mean /= static_cast<double>(s.size());
      scores.push_back(mean);
      std::cout << "task " << task.string() << " normalized_score " << format_double(mean) << '\n';
    }
    std::cout << "failure_rate " << format_double(failure_rate(scores, *threshold)) << '\n';
  }
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("sweep: bad value '" + item + "'");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Switching between independent and centralized multi-agent learners"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "train one or all seeds of a config");
  train_cmd->add_option("--config", train_args.config, "run config (JSON)")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--seed", train_args.seed, "single seed; default is every seed in the config");
  train_cmd->add_option("--out", train_args.out, "output directory; default is output.dir");

  TrainArgs random_args;
  auto* random_cmd = app.add_subcommand("baseline-random", "train with a fair-coin switch");
  random_cmd->add_option("--config", random_args.config)->required()->check(CLI::ExistingFile);
  random_cmd->add_option("--seed", random_args.seed);
  random_cmd->add_option("--out", random_args.out);

  std::string sweep_config, sweep_param, sweep_values, sweep_out;
  int sweep_threads = 1;
  auto* sweep_cmd = app.add_subcommand("sweep", "train across parameter values and seeds");
  sweep_cmd->add_option("--config", sweep_config)->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--param", sweep_param, "alpha | switching_cost | budget_fraction")->required();
  sweep_cmd->add_option("--values", sweep_values, "comma separated")->required();
  sweep_cmd->add_option("--out", sweep_out)->required();
  sweep_cmd->add_option("--threads", sweep_threads)->check(CLI::PositiveNumber);

  std::string mdp_path;
  double oracle_c = 0.0;
  double oracle_tol = 1e-10;
  std::optional<int> oracle_budget;
  auto* oracle_cmd = app.add_subcommand("oracle", "exact switching values of a small MDP fixture");
  oracle_cmd->add_option("--mdp", mdp_path)->required()->check(CLI::ExistingFile);
  oracle_cmd->add_option("--c", oracle_c, "switching cost")->required();
  oracle_cmd->add_option("--budget", oracle_budget, "activation budget")->check(CLI::NonNegativeNumber);
  oracle_cmd->add_option("--tolerance", oracle_tol)->check(CLI::PositiveNumber);

  std::string report_root;
  bool report_heatmap = false;
  std::optional<double> report_threshold;
  auto* report_cmd = app.add_subcommand("report", "aggregate run directories");
  report_cmd->add_option("--runs", report_root)->required()->check(CLI::ExistingDirectory);
  report_cmd->add_flag("--heatmap", report_heatmap);
  report_cmd->add_option("--failure-threshold", report_threshold)->check(CLI::Range(0.0, 1.0));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*train_cmd) {
      run_training(train_args, false);
    } else if (*random_cmd) {
      run_training(random_args, true);
    } else if (*sweep_cmd) {
      const RunConfig config = load_run_config(sweep_config);
      const SweepParameter param = parse_sweep_parameter(sweep_param);
      const std::vector<double> values = parse_values(sweep_values);
      const auto rows = sweep(config, param, values, sweep_threads, fs::path(sweep_out));
      fs::create_directories(sweep_out);
      std::ofstream out(fs::path(sweep_out) / "sweep.csv");
      write_sweep_csv(out, rows);
      write_sweep_csv(std::cout, rows);
    } else if (*oracle_cmd) {
      run_oracle(mdp_path, oracle_c, oracle_budget, oracle_tol);
    } else if (*report_cmd) {
      run_report(report_root, report_heatmap, report_threshold);
    }
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}
