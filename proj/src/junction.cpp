#include "mansa/junction.hpp"

#include <algorithm>
#include <cstdlib>

namespace mansa {

void validate(const JunctionConfig& c) {
  if (c.arm_length < 2) throw ConfigError("junction: arm_length must be >= 2");
  if (c.collision_penalty > 0.0) throw ConfigError("junction: collision_penalty must be <= 0");
  if (c.arrival_reward < 0.0) throw ConfigError("junction: arrival_reward must be >= 0");
  if (c.episode_limit < 1) throw ConfigError("junction: episode_limit must be positive");
}

JunctionEnv::JunctionEnv(JunctionConfig config) : config_(config) {
  validate(config_);
  const auto cells = static_cast<std::uint64_t>(road_length());
  spec_ = EnvSpec{"junction", 2, {2, 2}, 2 * cells * cells, config_.episode_limit, config_.discount};
  validate(spec_);
}

ResetResult JunctionEnv::reset(std::uint64_t) {
  state_ = JunctionState{};
  started_ = true;
  return {state_key(), observations()};
}

bool JunctionEnv::terminal() const {
  if (!started_) return true;
  if (state_.collided || state_.step_count >= config_.episode_limit) return true;
  return arrived(0) && arrived(1);
}

StepOutcome JunctionEnv::step(const JointAction& joint_action) {
  check_joint_action(joint_action);
  const int crossing = config_.arm_length;
  const int last = road_length() - 1;

  std::array<bool, 2> was_arrived{arrived(0), arrived(1)};
  for (int i = 0; i < 2; ++i) {
    if (joint_action[i] == kGas && state_.position[i] < last) ++state_.position[i];
  }
  ++state_.step_count;

  if (state_.position[0] == crossing && state_.position[1] == crossing) {
    state_.collided = true;
    return {config_.collision_penalty, state_key(), observations(), true};
  }
  double reward = 0.0;
  for (int i = 0; i < 2; ++i) {
    if (was_arrived[i]) continue;
    reward += config_.step_penalty;
    if (arrived(i)) reward += config_.arrival_reward;
  }
  const bool done = terminal();
  return {reward, state_key(), observations(), done, done && !(arrived(0) && arrived(1))};
}

std::vector<Observation> JunctionEnv::observations() const {
  return {Observation{distance_to_crossing(0)}, Observation{distance_to_crossing(1)}};
}

StateKey JunctionEnv::encode(const JunctionState& s) const {
  const auto cells = static_cast<StateKey>(road_length());
  StateKey key = static_cast<StateKey>(s.position[0]) * cells + static_cast<StateKey>(s.position[1]);
  return s.collided ? key + cells * cells : key;
}

FocalCell JunctionEnv::focal_cell(StateKey key) const {
  const auto cells = static_cast<StateKey>(road_length());
  key %= cells * cells;
  const int p0 = static_cast<int>(key / cells);
  const int p1 = static_cast<int>(key % cells);
  return {config_.arm_length - p0, config_.arm_length - p1};
}

int crossing_distance(FocalCell cell) { return std::max(std::abs(cell.x), std::abs(cell.y)); }

}  // namespace mansa
