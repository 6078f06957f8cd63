#include "mansa/env.hpp"

#include <string>

namespace mansa {

void validate(const EnvSpec& spec) {
  if (spec.n_agents < 2) throw ConfigError("env '" + spec.name + "': n_agents must be >= 2");
  if (static_cast<int>(spec.action_counts.size()) != spec.n_agents) {
    throw ConfigError("env '" + spec.name + "': action_counts must have one entry per agent");
  }
  for (int count : spec.action_counts) {
    if (count < 2) throw ConfigError("env '" + spec.name + "': every agent needs >= 2 actions");
  }
  if (spec.state_count && *spec.state_count == 0) {
    throw ConfigError("env '" + spec.name + "': state_count must be positive");
  }
  if (spec.episode_limit < 1) throw ConfigError("env '" + spec.name + "': episode_limit must be >= 1");
  if (!(spec.discount >= 0.0 && spec.discount < 1.0)) {
    throw ConfigError("env '" + spec.name + "': discount must lie in [0,1)");
  }
}

void Env::check_joint_action(const JointAction& joint_action) const {
  const EnvSpec& s = spec();
  if (terminal()) throw ContractViolation(s.name + ": step called on a terminal episode");
  if (static_cast<int>(joint_action.size()) != s.n_agents) {
    throw ContractViolation(s.name + ": joint action has wrong arity");
  }
  for (int i = 0; i < s.n_agents; ++i) {
    if (joint_action[i] < 0 || joint_action[i] >= s.action_counts[i]) {
      throw ContractViolation(s.name + ": action " + std::to_string(joint_action[i]) +
                              " out of range for agent " + std::to_string(i));
    }
  }
}

}  // namespace mansa
