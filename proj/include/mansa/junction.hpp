#pragma once

#include <array>
#include <memory>

#include "mansa/env.hpp"

namespace mansa {

enum JunctionAction : int { kGas = 0, kBrake = 1 };

struct JunctionConfig {
  int arm_length = 4;
  double collision_penalty = -5.0;
  double arrival_reward = 1.0;
  double step_penalty = -0.01;
  int episode_limit = 20;
  double discount = 0.99;
};

void validate(const JunctionConfig& config);

struct JunctionState {
  std::array<int, 2> position{};  // cells travelled from the road entrance
  int step_count = 0;
  bool collided = false;
  bool operator==(const JunctionState&) const = default;
};

/// Two one-cell-wide roads of 2 * arm_length + 1 cells crossing at cell
/// arm_length. Each agent sees only its own signed distance to the crossing.
///
/// Per-agent reward: step_penalty while not yet arrived, plus arrival_reward
/// on reaching the far end. Both agents entering the crossing in one step
/// ends the episode with team reward collision_penalty.
///
/// State key: position[0] * (2 * arm_length + 1) + position[1], with an extra
/// block of keys for the collided terminal state.
class JunctionEnv final : public Env {
 public:
  explicit JunctionEnv(JunctionConfig config);

  const EnvSpec& spec() const override { return spec_; }
  ResetResult reset(std::uint64_t seed) override;
  StepOutcome step(const JointAction& joint_action) override;
  bool terminal() const override;
  StateKey state_key() const override { return encode(state_); }
  std::vector<Observation> observations() const override;
  /// (x, y) = each agent's signed distance to the crossing.
  FocalCell focal_cell(StateKey key) const override;
  std::unique_ptr<Env> clone() const override { return std::make_unique<JunctionEnv>(*this); }

  StateKey encode(const JunctionState& state) const;
  int distance_to_crossing(int agent) const { return config_.arm_length - state_.position[agent]; }
  int road_length() const { return 2 * config_.arm_length + 1; }
  bool arrived(int agent) const { return state_.position[agent] == road_length() - 1; }

  const JunctionConfig& config() const { return config_; }
  const JunctionState& state() const { return state_; }

 private:
  JunctionConfig config_;
  EnvSpec spec_;
  JunctionState state_;
  bool started_ = false;
};

/// Chebyshev distance of a focal cell from the crossing.
int crossing_distance(FocalCell cell);

}  // namespace mansa
