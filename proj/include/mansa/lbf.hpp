#pragma once

#include <memory>
#include <vector>

#include "mansa/env.hpp"

namespace mansa {

struct Cell {
  int x = 0;
  int y = 0;
  bool operator==(const Cell&) const = default;
};

enum LbfAction : int { kUp = 0, kDown, kLeft, kRight, kLoad, kNoop, kLbfActionCount };

struct LbfConfig {
  int width = 5;
  int height = 5;
  int n_players = 2;
  int n_foods = 1;
  int max_player_level = 2;
  bool coop = false;
  int sight = 2;
  int episode_limit = 50;
  double discount = 0.99;
};

void validate(const LbfConfig& config);

struct LbfPlayer {
  Cell pos;
  int level = 1;
  bool alive = true;
  bool operator==(const LbfPlayer&) const = default;
};

struct LbfFood {
  Cell pos;
  int level = 1;
  bool collected = false;
  bool operator==(const LbfFood&) const = default;
};

struct LbfState {
  std::vector<LbfPlayer> players;
  std::vector<LbfFood> foods;
  int step_count = 0;
  bool operator==(const LbfState&) const = default;
};

/// Observation cell classes, written as (class, level) pairs.
enum LbfCellClass : int { kEmpty = 0, kPlayer = 1, kFood = 2, kWall = 3 };

/// Level-Based Foraging.
///
/// Food is collected when the summed level of orthogonally adjacent players
/// choosing kLoad reaches the food level. Team reward per step is the
/// collected food level divided by the episode's total food level, so an
/// episode returns at most 1.
///
/// Global state key, least significant digit first: for each player its cell
/// index (y * width + x) then level - 1; for each food its cell index, level - 1
/// and collected flag. The step counter is not part of the key.
class LbfEnv final : public Env {
 public:
  explicit LbfEnv(LbfConfig config);

  const EnvSpec& spec() const override { return spec_; }
  ResetResult reset(std::uint64_t seed) override;
  StepOutcome step(const JointAction& joint_action) override;
  bool terminal() const override;
  StateKey state_key() const override { return encode(state_); }
  std::vector<Observation> observations() const override;
  FocalCell focal_cell(StateKey key) const override;
  std::unique_ptr<Env> clone() const override { return std::make_unique<LbfEnv>(*this); }

  /// (2*sight+1)^2 window around the agent as (class, level) pairs, row-major,
  /// followed by the agent's own level. Off-grid cells read as walls.
  Observation observe(int agent) const;

  StateKey encode(const LbfState& state) const;
  const LbfConfig& config() const { return config_; }
  const LbfState& state() const { return state_; }

  /// Installs an arbitrary state (tests, replays). Throws ConfigError if two
  /// uncollected entities share a cell or a level is out of range.
  void set_state(LbfState state);

  int max_food_level() const;
  double total_food_level() const;

 private:
  bool in_grid(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < config_.width && c.y < config_.height; }
  bool food_at(Cell c) const;
  bool player_at(Cell c) const;

  LbfConfig config_;
  EnvSpec spec_;
  LbfState state_;
  bool started_ = false;
};

}  // namespace mansa
