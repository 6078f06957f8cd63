#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "mansa/env.hpp"
#include "mansa/junction.hpp"
#include "mansa/lbf.hpp"
#include "mansa/monotonic_q.hpp"
#include "mansa/schedule.hpp"

namespace mansa {

enum class EnvKind { assurance, nonmonotonic, lbf, junction };

struct EnvConfig {
  EnvKind kind = EnvKind::assurance;
  double alpha = 0.0;
  double reward_noise_std = 0.0;
  double discount = 0.99;
  LbfConfig lbf;
  JunctionConfig junction;
};

/// Who picks g_t during training.
enum class SwitchMode {
  learned,           // the switch controller
  independent_only,  // g = 0 always
  central_only,      // g = 1 always (subject to the budget)
  random,            // fair coin (subject to the budget)
};

struct LearnerConfig {
  double iql_lr = 0.1;
  double central_lr = 0.02;
  JointExploration central_exploration = JointExploration::joint;
  double initial_value = 0.0;  // starting Q for unseen entries of both learners
  LinearSchedule epsilon{1.0, 0.05, 0};
};

struct GlobalConfig {
  SwitchMode mode = SwitchMode::learned;
  double lr = 0.1;
  double switching_cost = 0.01;
  LinearSchedule temperature{1.0, 0.1, 0};
};

struct BudgetConfig {
  bool enabled = false;
  std::int64_t total = 0;
};

struct ScheduleConfig {
  std::uint64_t total_steps = 20'000;
  std::size_t buffer_capacity = 50'000;
  std::size_t batch_size = 32;
  std::uint64_t warmup_steps = 1'000;
  std::uint64_t update_period = 1;
  std::uint64_t eval_period = 1'000;
  int eval_episodes = 20;
  std::vector<std::uint64_t> seeds{1, 2, 3};
};

struct OutputConfig {
  std::string dir = "runs";
};

/// Sections: env / learners / global / budget / schedule / output. Unknown
/// keys anywhere are errors. Schedules without decay_steps decay over half
/// the run.
struct RunConfig {
  EnvConfig env;
  LearnerConfig learners;
  GlobalConfig global;
  BudgetConfig budget;
  ScheduleConfig schedule;
  OutputConfig output;
};

/// Fills defaulted decay lengths and checks every invariant.
void finalize(RunConfig& config);

RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& config);

std::unique_ptr<Env> make_env(const EnvConfig& config);

/// Best undiscounted episode return the env admits, for score normalization.
double achievable_max_return(const EnvConfig& config);

std::string to_string(EnvKind kind);
std::string to_string(SwitchMode mode);

}  // namespace mansa
