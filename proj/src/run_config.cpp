#include <cmath>
#include "mansa/run_config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "mansa/matrix_game.hpp"

namespace mansa {
namespace {

using nlohmann::json;

// Reads keys from one JSON object and rejects whatever was not read.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ConfigError("config section '" + name_ + "' must be an object");
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError("config '" + name_ + "." + key + "': " + e.what());
    }
  }

  const json* child(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) {
        throw ConfigError("config: unknown key '" + name_ + "." + item.key() + "'");
      }
    }
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

LinearSchedule parse_schedule(const json* j, LinearSchedule fallback, const std::string& name) {
  if (!j) return fallback;
  Section s(*j, name);
  LinearSchedule out;
  out.start = s.get("start", fallback.start);
  out.end = s.get("end", fallback.end);
  out.decay_steps = s.get<std::uint64_t>("decay_steps", fallback.decay_steps);
  s.finish();
  return out;
}

json schedule_json(const LinearSchedule& s) {
  return {{"start", s.start}, {"end", s.end}, {"decay_steps", s.decay_steps}};
}

EnvKind parse_env_kind(const std::string& s) {
  if (s == "assurance") return EnvKind::assurance;
  if (s == "nonmonotonic") return EnvKind::nonmonotonic;
  if (s == "lbf") return EnvKind::lbf;
  if (s == "junction") return EnvKind::junction;
  throw ConfigError("config: unknown env kind '" + s + "'");
}

SwitchMode parse_switch_mode(const std::string& s) {
  if (s == "learned") return SwitchMode::learned;
  if (s == "independent_only") return SwitchMode::independent_only;
  if (s == "central_only") return SwitchMode::central_only;
  if (s == "random") return SwitchMode::random;
  throw ConfigError("config: unknown global.mode '" + s + "'");
}

JointExploration parse_exploration(const std::string& s) {
  if (s == "joint") return JointExploration::joint;
  if (s == "per_agent") return JointExploration::per_agent;
  throw ConfigError("config: unknown central_exploration '" + s + "'");
}

EnvConfig parse_env(const json& j) {
  Section s(j, "env");
  EnvConfig env;
  env.kind = parse_env_kind(s.get<std::string>("kind", "assurance"));
  env.discount = s.get("discount", env.discount);
  switch (env.kind) {
    case EnvKind::assurance:
    case EnvKind::nonmonotonic:
      env.alpha = s.get("alpha", env.alpha);
      env.reward_noise_std = s.get("reward_noise_std", env.reward_noise_std);
      break;
    case EnvKind::lbf: {
      LbfConfig& c = env.lbf;
      c.width = s.get("width", c.width);
      c.height = s.get("height", c.height);
      c.n_players = s.get("n_players", c.n_players);
      c.n_foods = s.get("n_foods", c.n_foods);
      c.max_player_level = s.get("max_player_level", c.max_player_level);
      c.coop = s.get("coop", c.coop);
      c.sight = s.get("sight", c.sight);
      c.episode_limit = s.get("episode_limit", c.episode_limit);
      break;
    }
    case EnvKind::junction: {
      JunctionConfig& c = env.junction;
      c.arm_length = s.get("arm_length", c.arm_length);
      c.collision_penalty = s.get("collision_penalty", c.collision_penalty);
      c.arrival_reward = s.get("arrival_reward", c.arrival_reward);
      c.step_penalty = s.get("step_penalty", c.step_penalty);
      c.episode_limit = s.get("episode_limit", c.episode_limit);
      break;
    }
  }
  s.finish();
  env.lbf.discount = env.discount;
  env.junction.discount = env.discount;
  return env;
}

}  // namespace

void finalize(RunConfig& c) {
  ScheduleConfig& sch = c.schedule;
  if (sch.total_steps == 0) throw ConfigError("schedule.total_steps must be positive");
  if (sch.buffer_capacity == 0) throw ConfigError("schedule.buffer_capacity must be positive");
  if (sch.batch_size == 0) throw ConfigError("schedule.batch_size must be positive");
  if (sch.update_period == 0) throw ConfigError("schedule.update_period must be positive");
  if (sch.eval_period == 0) throw ConfigError("schedule.eval_period must be positive");
  if (sch.eval_episodes < 1) throw ConfigError("schedule.eval_episodes must be >= 1");
  if (sch.seeds.empty()) throw ConfigError("schedule.seeds must not be empty");
  std::vector<std::uint64_t> sorted = sch.seeds;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ConfigError("schedule.seeds must be distinct");
  }
  if (c.learners.epsilon.decay_steps == 0) c.learners.epsilon.decay_steps = sch.total_steps / 2;
  if (c.global.temperature.decay_steps == 0) c.global.temperature.decay_steps = sch.total_steps / 2;
  validate_epsilon(c.learners.epsilon);
  validate_temperature(c.global.temperature);
  if (!(c.learners.iql_lr > 0.0 && c.learners.iql_lr <= 1.0)) throw ConfigError("learners.iql_lr must lie in (0,1]");
  if (!(c.learners.central_lr > 0.0 && c.learners.central_lr <= 1.0)) {
    throw ConfigError("learners.central_lr must lie in (0,1]");
  }
  if (!std::isfinite(c.learners.initial_value)) throw ConfigError("learners.initial_value must be finite");
  if (!(c.global.lr > 0.0 && c.global.lr <= 1.0)) throw ConfigError("global.lr must lie in (0,1]");
  if (!(c.global.switching_cost >= 0.0)) throw ConfigError("global.switching_cost must be >= 0");
  if (c.budget.enabled && c.budget.total < 0) throw ConfigError("budget.total must be >= 0");
  if (!(c.env.discount >= 0.0 && c.env.discount < 1.0)) throw ConfigError("env.discount must lie in [0,1)");
  make_env(c.env);  // validates env parameters
}

RunConfig parse_run_config(const json& j) {
  Section root(j, "config");
  RunConfig c;
  if (const json* e = root.child("env")) c.env = parse_env(*e);
  if (const json* l = root.child("learners")) {
    Section s(*l, "learners");
    c.learners.iql_lr = s.get("iql_lr", c.learners.iql_lr);
    c.learners.central_lr = s.get("central_lr", c.learners.central_lr);
    c.learners.initial_value = s.get("initial_value", c.learners.initial_value);
    c.learners.central_exploration = parse_exploration(s.get<std::string>("central_exploration", "joint"));
    c.learners.epsilon = parse_schedule(s.child("epsilon"), c.learners.epsilon, "learners.epsilon");
    s.finish();
  }
  if (const json* g = root.child("global")) {
    Section s(*g, "global");
    c.global.mode = parse_switch_mode(s.get<std::string>("mode", "learned"));
    c.global.lr = s.get("lr", c.global.lr);
    c.global.switching_cost = s.get("switching_cost", c.global.switching_cost);
    c.global.temperature = parse_schedule(s.child("temperature"), c.global.temperature, "global.temperature");
    s.finish();
  }
  if (const json* b = root.child("budget")) {
    Section s(*b, "budget");
    c.budget.enabled = s.get("enabled", c.budget.enabled);
    c.budget.total = s.get("total", c.budget.total);
    s.finish();
  }
  if (const json* sc = root.child("schedule")) {
    Section s(*sc, "schedule");
    ScheduleConfig& d = c.schedule;
    d.total_steps = s.get("total_steps", d.total_steps);
    d.buffer_capacity = s.get("buffer_capacity", d.buffer_capacity);
    d.batch_size = s.get("batch_size", d.batch_size);
    d.warmup_steps = s.get("warmup_steps", d.warmup_steps);
    d.update_period = s.get("update_period", d.update_period);
    d.eval_period = s.get("eval_period", d.eval_period);
    d.eval_episodes = s.get("eval_episodes", d.eval_episodes);
    d.seeds = s.get("seeds", d.seeds);
    s.finish();
  }
  if (const json* o = root.child("output")) {
    Section s(*o, "output");
    c.output.dir = s.get("dir", c.output.dir);
    s.finish();
  }
  root.finish();
  finalize(c);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path.string() + "': " + e.what());
  }
  return parse_run_config(j);
}

json to_json(const RunConfig& c) {
  json env{{"kind", to_string(c.env.kind)}, {"discount", c.env.discount}};
  switch (c.env.kind) {
    case EnvKind::assurance:
    case EnvKind::nonmonotonic:
      env["alpha"] = c.env.alpha;
      env["reward_noise_std"] = c.env.reward_noise_std;
      break;
    case EnvKind::lbf:
      env["width"] = c.env.lbf.width;
      env["height"] = c.env.lbf.height;
      env["n_players"] = c.env.lbf.n_players;
      env["n_foods"] = c.env.lbf.n_foods;
      env["max_player_level"] = c.env.lbf.max_player_level;
      env["coop"] = c.env.lbf.coop;
      env["sight"] = c.env.lbf.sight;
      env["episode_limit"] = c.env.lbf.episode_limit;
      break;
    case EnvKind::junction:
      env["arm_length"] = c.env.junction.arm_length;
      env["collision_penalty"] = c.env.junction.collision_penalty;
      env["arrival_reward"] = c.env.junction.arrival_reward;
      env["step_penalty"] = c.env.junction.step_penalty;
      env["episode_limit"] = c.env.junction.episode_limit;
      break;
  }
  return json{
      {"env", env},
      {"learners",
       {{"iql_lr", c.learners.iql_lr},
        {"central_lr", c.learners.central_lr},
        {"initial_value", c.learners.initial_value},
        {"central_exploration",
         c.learners.central_exploration == JointExploration::joint ? "joint" : "per_agent"},
        {"epsilon", schedule_json(c.learners.epsilon)}}},
      {"global",
       {{"mode", to_string(c.global.mode)},
        {"lr", c.global.lr},
        {"switching_cost", c.global.switching_cost},
        {"temperature", schedule_json(c.global.temperature)}}},
      {"budget", {{"enabled", c.budget.enabled}, {"total", c.budget.total}}},
      {"schedule",
       {{"total_steps", c.schedule.total_steps},
        {"buffer_capacity", c.schedule.buffer_capacity},
        {"batch_size", c.schedule.batch_size},
        {"warmup_steps", c.schedule.warmup_steps},
        {"update_period", c.schedule.update_period},
        {"eval_period", c.schedule.eval_period},
        {"eval_episodes", c.schedule.eval_episodes},
        {"seeds", c.schedule.seeds}}},
      {"output", {{"dir", c.output.dir}}},
  };
}

std::unique_ptr<Env> make_env(const EnvConfig& c) {
  switch (c.kind) {
    case EnvKind::assurance:
      return std::make_unique<MatrixGameEnv>(assurance_spec(c.alpha), c.reward_noise_std, c.discount);
    case EnvKind::nonmonotonic:
      return std::make_unique<MatrixGameEnv>(nonmonotonic_spec(c.alpha), c.reward_noise_std, c.discount);
    case EnvKind::lbf: {
      LbfConfig l = c.lbf;
      l.discount = c.discount;
      return std::make_unique<LbfEnv>(l);
    }
    case EnvKind::junction: {
      JunctionConfig jc = c.junction;
      jc.discount = c.discount;
      return std::make_unique<JunctionEnv>(jc);
    }
  }
  throw ConfigError("unknown env kind");
}

double achievable_max_return(const EnvConfig& c) {
  switch (c.kind) {
    case EnvKind::assurance:
    case EnvKind::nonmonotonic: {
      auto env = make_env(c);
      const auto& m = static_cast<const MatrixGameEnv&>(*env).payoff();
      return std::max({m(0, 0), m(0, 1), m(1, 0), m(1, 1)});
    }
    case EnvKind::lbf:
      return 1.0;
    case EnvKind::junction: {
      // One agent drives straight through, the other waits a single step.
      const JunctionConfig& j = c.junction;
      const int straight = 2 * j.arm_length;
      return 2.0 * j.arrival_reward + j.step_penalty * (2 * straight + 1);
    }
  }
  return 1.0;
}

std::string to_string(EnvKind kind) {
  switch (kind) {
    case EnvKind::assurance: return "assurance";
    case EnvKind::nonmonotonic: return "nonmonotonic";
    case EnvKind::lbf: return "lbf";
    case EnvKind::junction: return "junction";
  }
  return "?";
}

std::string to_string(SwitchMode mode) {
  switch (mode) {
    case SwitchMode::learned: return "learned";
    case SwitchMode::independent_only: return "independent_only";
    case SwitchMode::central_only: return "central_only";
    case SwitchMode::random: return "random";
  }
  return "?";
}

}  // namespace mansa
