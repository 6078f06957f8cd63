#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <vector>

#include "mansa/env.hpp"
#include "mansa/independent_q.hpp"
#include "mansa/monotonic_q.hpp"
#include "mansa/replay_buffer.hpp"
#include "mansa/run_config.hpp"
#include "mansa/switch_controller.hpp"

namespace mansa {

struct MetricsRecord {
  std::uint64_t step = 0;
  std::uint64_t episode = 0;
  std::uint64_t seed = 0;
  double eval_return = 0.0;
  std::uint64_t cl_calls_cum = 0;
  double cl_call_pct = 0.0;
  std::int64_t budget_remaining = -1;  // -1 outside budget mode
  double epsilon = 0.0;
  double temperature = 0.0;
  bool operator==(const MetricsRecord&) const = default;
};

struct StateCounts {
  std::uint64_t activations = 0;
  std::uint64_t visits = 0;
};

struct RunArtifacts {
  RunConfig config;
  std::uint64_t seed = 0;
  std::vector<MetricsRecord> metrics;
  IndependentQ iql;
  MonotonicJointQ central;
  GlobalQ global;
  ReplayBuffer buffer;
  std::map<StateKey, StateCounts> state_counts;
  std::vector<std::uint8_t> decisions;  // g_t for every training step
  BudgetState budget;
  std::uint64_t cl_calls = 0;
  std::uint64_t episodes = 0;

  double final_return() const { return metrics.empty() ? 0.0 : metrics.back().eval_return; }
  double cl_call_pct() const;
};

/// The training loop: per step the switch decision picks the centralized or
/// the independent controller, the transition is stored, and all three
/// learners update from one shared sampled batch. Greedy evaluation every
/// eval_period steps and at the end emits a MetricsRecord.
///
/// Throws InvariantViolation if the activation budget is ever exceeded.
RunArtifacts train(const RunConfig& config, std::uint64_t seed);

/// train() with a fair-coin switch decision.
RunArtifacts random_switch_baseline(RunConfig config, std::uint64_t seed);

using JointPolicy =
    std::function<JointAction(StateKey state, const std::vector<Observation>& observations, Rng& rng)>;

struct EvaluationResult {
  double mean_return = 0.0;
  std::vector<double> returns;
};

/// Undiscounted returns of `episodes` episodes on a copy of `env`. Episode k
/// resets with mix_seed(seed, k); the policy's rng is seeded from `seed`.
EvaluationResult evaluate(const JointPolicy& policy, const Env& env, int episodes, std::uint64_t seed);

/// Greedy controllers; the switch takes argmax with ties to g = 0 under the
/// budget mask (the random mode keeps flipping its coin).
JointPolicy greedy_policy(const RunArtifacts& run);

struct HeatmapRow {
  StateKey state_key = 0;
  int x = 0;
  int y = 0;
  std::uint64_t activations = 0;
  std::uint64_t visits = 0;
  double rate = 0.0;
};

/// Per visited state activation counts; rate is 0 for unvisited states.
std::vector<HeatmapRow> heatmap(const RunArtifacts& run);

/// Writes metrics.csv, heatmap.csv, config.json and iql/central/global tables.
void write_run(const RunArtifacts& run, const std::filesystem::path& dir);

}  // namespace mansa
