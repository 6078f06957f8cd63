#include "mansa/trainer.hpp"

#include <fstream>

#include "mansa/report.hpp"

namespace mansa {
namespace {

enum Stream : std::uint64_t { kActions = 1, kSwitch = 2, kBuffer = 3, kEpisodes = 4, kEval = 5 };

int choose_switch(SwitchMode mode, const GlobalQ& global, const AugmentedKey& key, double temperature,
                  bool budget_mode, std::int64_t remaining, Rng& rng) {
  const bool allowed = !budget_mode || remaining > 0;
  switch (mode) {
    case SwitchMode::learned: return global.act(key, temperature, rng);
    case SwitchMode::independent_only: return 0;
    case SwitchMode::central_only: return allowed ? 1 : 0;
    case SwitchMode::random: {
      const int coin = uniform01(rng) < 0.5 ? 1 : 0;
      return allowed ? coin : 0;
    }
  }
  return 0;
}

}  // namespace

double RunArtifacts::cl_call_pct() const {
  return decisions.empty() ? 0.0 : 100.0 * static_cast<double>(cl_calls) / decisions.size();
}

RunArtifacts train(const RunConfig& input, std::uint64_t seed) {
  RunConfig config = input;
  finalize(config);
  std::unique_ptr<Env> env = make_env(config.env);
  const EnvSpec& spec = env->spec();
  const double gamma = config.env.discount;
  const bool budget_mode = config.budget.enabled;
  const ScheduleConfig& sch = config.schedule;

  RunArtifacts run{config,
                   seed,
                   {},
                   IndependentQ(spec.action_counts, config.learners.iql_lr, config.learners.initial_value),
                   MonotonicJointQ(spec.action_counts, config.learners.central_lr,
                                   config.learners.central_exploration,
                                   config.learners.initial_value),
                   GlobalQ(config.global.switching_cost, config.global.lr, budget_mode),
                   ReplayBuffer(sch.buffer_capacity),
                   {},
                   {},
                   BudgetState::full(budget_mode ? config.budget.total : 0),
                   0,
                   0};
  run.decisions.reserve(sch.total_steps);

  Rng action_rng(mix_seed(seed, kActions));
  Rng switch_rng(mix_seed(seed, kSwitch));
  Rng buffer_rng(mix_seed(seed, kBuffer));
  const std::uint64_t episode_seed = mix_seed(seed, kEpisodes);
  const std::uint64_t eval_seed = mix_seed(seed, kEval);

  ResetResult start = env->reset(mix_seed(episode_seed, 0));
  StateKey state = start.state;
  std::vector<Observation> obs = std::move(start.observations);

  for (std::uint64_t t = 1; t <= sch.total_steps; ++t) {
    const double epsilon = config.learners.epsilon.at(t - 1);
    const double temperature = config.global.temperature.at(t - 1);

    const AugmentedKey key = augment_state(state, run.budget, budget_mode);
    const int g = choose_switch(config.global.mode, run.global, key, temperature, budget_mode,
                                run.budget.remaining, switch_rng);
    JointAction action = g == 1 ? run.central.act(state, epsilon, action_rng)
                                : run.iql.act(obs, epsilon, action_rng);

    StepOutcome out = env->step(action);
    const std::int64_t budget_before = budget_mode ? run.budget.remaining : -1;
    if (budget_mode) run.budget = budget_tick(run.budget, g);
    const std::int64_t budget_after = budget_mode ? run.budget.remaining : -1;

    StateCounts& counts = run.state_counts[state];
    ++counts.visits;
    counts.activations += g;
    run.cl_calls += g;
    run.decisions.push_back(static_cast<std::uint8_t>(g));

    TransitionRecord rec{t,          state,         obs,  std::move(action), g,
                         out.team_reward, out.next_state, out.observations,
                         out.terminal && !out.truncated,
                         budget_before,   budget_after};
    run.buffer.push(std::move(rec));

    if (out.terminal) {
      ++run.episodes;
      ResetResult r = env->reset(mix_seed(episode_seed, run.episodes));
      state = r.state;
      obs = std::move(r.observations);
    } else {
      state = out.next_state;
      obs = std::move(out.observations);
    }

    if (t > sch.warmup_steps && t % sch.update_period == 0) {
      const auto batch = run.buffer.sample(sch.batch_size, buffer_rng);
      run.iql.update(Batch(batch), gamma);
      run.central.update(Batch(batch), gamma);
      run.global.update(Batch(batch), gamma);
    }

    if (budget_mode && static_cast<std::int64_t>(run.cl_calls) > config.budget.total) {
      throw InvariantViolation("activation budget exceeded");
    }

    if (t % sch.eval_period == 0 || t == sch.total_steps) {
      EvaluationResult eval = evaluate(greedy_policy(run), *env, sch.eval_episodes, eval_seed);
      run.metrics.push_back({t, run.episodes, seed, eval.mean_return, run.cl_calls,
                             100.0 * static_cast<double>(run.cl_calls) / static_cast<double>(t),
                             budget_mode ? run.budget.remaining : -1, epsilon, temperature});
    }
  }
  return run;
}

RunArtifacts random_switch_baseline(RunConfig config, std::uint64_t seed) {
  config.global.mode = SwitchMode::random;
  return train(config, seed);
}

EvaluationResult evaluate(const JointPolicy& policy, const Env& env, int episodes, std::uint64_t seed) {
  if (episodes < 1) throw ContractViolation("evaluate: need at least one episode");
  std::unique_ptr<Env> e = env.clone();
  Rng rng(seed);
  EvaluationResult result;
  for (int k = 0; k < episodes; ++k) {
    ResetResult r = e->reset(mix_seed(seed, static_cast<std::uint64_t>(k)));
    StateKey state = r.state;
    std::vector<Observation> obs = std::move(r.observations);
    double total = 0.0;
    while (!e->terminal()) {
      StepOutcome out = e->step(policy(state, obs, rng));
      total += out.team_reward;
      state = out.next_state;
      obs = std::move(out.observations);
    }
    result.returns.push_back(total);
    result.mean_return += total;
  }
  result.mean_return /= episodes;
  return result;
}

JointPolicy greedy_policy(const RunArtifacts& run) {
  const SwitchMode mode = run.config.global.mode;
  const bool budget_mode = run.config.budget.enabled;
  const BudgetState budget = run.budget;
  return [&run, mode, budget_mode, budget](StateKey state, const std::vector<Observation>& obs,
                                           Rng& rng) -> JointAction {
    const AugmentedKey key = augment_state(state, budget, budget_mode);
    const bool allowed = !budget_mode || budget.remaining > 0;
    int g = 0;
    switch (mode) {
      case SwitchMode::learned: g = run.global.greedy(key); break;
      case SwitchMode::independent_only: g = 0; break;
      case SwitchMode::central_only: g = allowed ? 1 : 0; break;
      case SwitchMode::random: g = (uniform01(rng) < 0.5 && allowed) ? 1 : 0; break;
    }
    return g == 1 ? run.central.greedy(state) : run.iql.greedy(obs);
  };
}

std::vector<HeatmapRow> heatmap(const RunArtifacts& run) {
  std::unique_ptr<Env> env = make_env(run.config.env);
  std::vector<HeatmapRow> rows;
  rows.reserve(run.state_counts.size());
  for (const auto& [key, c] : run.state_counts) {
    const FocalCell cell = env->focal_cell(key);
    const double rate = c.visits == 0 ? 0.0 : static_cast<double>(c.activations) / c.visits;
    rows.push_back({key, cell.x, cell.y, c.activations, c.visits, rate});
  }
  return rows;
}

void write_run(const RunArtifacts& run, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "metrics.csv");
    write_metrics_csv(out, run.metrics);
  }
  {
    std::ofstream out(dir / "heatmap.csv");
    write_heatmap_csv(out, heatmap(run));
  }
  {
    nlohmann::json j = to_json(run.config);
    j["schedule"]["seeds"] = std::vector<std::uint64_t>{run.seed};
    std::ofstream out(dir / "config.json");
    out << j.dump(2) << '\n';
  }
  {
    std::ofstream out(dir / "iql.txt");
    run.iql.write(out);
  }
  {
    std::ofstream out(dir / "central.txt");
    run.central.write(out);
  }
  {
    std::ofstream out(dir / "global.txt");
    run.global.write(out);
  }
}

}  // namespace mansa
