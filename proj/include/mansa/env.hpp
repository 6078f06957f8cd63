#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mansa/core.hpp"

namespace mansa {

struct EnvSpec {
  std::string name;
  int n_agents = 2;
  std::vector<int> action_counts;
  std::optional<std::uint64_t> state_count;  // nullopt = unbounded
  int episode_limit = 1;
  double discount = 0.99;
};

/// Throws ConfigError if the spec breaks its invariants.
void validate(const EnvSpec& spec);

struct ResetResult {
  StateKey state = 0;
  std::vector<Observation> observations;
};

struct StepOutcome {
  double team_reward = 0.0;
  StateKey next_state = 0;
  std::vector<Observation> observations;
  bool terminal = false;
  // Set together with terminal when only the step limit ended the episode.
  bool truncated = false;
};

/// Heatmap coordinate attached to a global state.
struct FocalCell {
  int x = 0;
  int y = 0;
};

/// A seeded dec-POMDP: global state, per-agent local observations, team reward.
///
/// reset() must be called before step(); stepping a terminal episode or
/// passing an out-of-range action throws ContractViolation.
class Env {
 public:
  virtual ~Env() = default;

  virtual const EnvSpec& spec() const = 0;
  virtual ResetResult reset(std::uint64_t seed) = 0;
  virtual StepOutcome step(const JointAction& joint_action) = 0;
  virtual bool terminal() const = 0;
  virtual StateKey state_key() const = 0;
  virtual std::vector<Observation> observations() const = 0;
  virtual FocalCell focal_cell(StateKey key) const = 0;
  virtual std::unique_ptr<Env> clone() const = 0;

 protected:
  void check_joint_action(const JointAction& joint_action) const;
};

}  // namespace mansa
