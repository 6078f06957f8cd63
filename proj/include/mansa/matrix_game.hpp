#pragma once

#include <array>
#include <memory>
#include <vector>

#include "mansa/env.hpp"

namespace mansa {

/// 2x2 team payoff: rows index agent 0's action, columns agent 1's.
struct PayoffMatrix {
  std::array<std::array<double, 2>, 2> entries{};

  /// Throws ConfigError unless `rows` is exactly 2x2.
  static PayoffMatrix from_rows(const std::vector<std::vector<double>>& rows);

  double operator()(int row, int col) const { return entries[row][col]; }
  bool symmetric() const { return entries[0][1] == entries[1][0]; }
  bool operator==(const PayoffMatrix&) const = default;
};

enum class GameKind { assurance, nonmonotonic, custom };

/// A game interpolated between a coupled matrix (alpha = 0) and a decoupled
/// one (alpha = 1).
struct AlphaGameSpec {
  GameKind kind = GameKind::custom;
  double alpha = 0.0;
  PayoffMatrix coupled;
  PayoffMatrix decoupled;
};

/// Entrywise alpha * decoupled + (1 - alpha) * coupled.
PayoffMatrix compose_matrix_game(const PayoffMatrix& coupled, const PayoffMatrix& decoupled,
                                 double alpha);

AlphaGameSpec assurance_spec(double alpha);
AlphaGameSpec nonmonotonic_spec(double alpha);

/// One-state, one-step, two-agent normal-form game.
///
/// Observations are empty (null token). An optional zero-mean Gaussian reward
/// noise can be switched on; it is drawn from a stream seeded by reset().
class MatrixGameEnv final : public Env {
 public:
  explicit MatrixGameEnv(AlphaGameSpec game, double reward_noise_std = 0.0, double discount = 0.99);

  const EnvSpec& spec() const override { return spec_; }
  ResetResult reset(std::uint64_t seed) override;
  StepOutcome step(const JointAction& joint_action) override;
  bool terminal() const override { return done_; }
  StateKey state_key() const override { return 0; }
  std::vector<Observation> observations() const override { return {Observation{}, Observation{}}; }
  FocalCell focal_cell(StateKey) const override { return {}; }
  std::unique_ptr<Env> clone() const override { return std::make_unique<MatrixGameEnv>(*this); }

  const PayoffMatrix& payoff() const { return payoff_; }
  const AlphaGameSpec& game() const { return game_; }

 private:
  AlphaGameSpec game_;
  PayoffMatrix payoff_;
  EnvSpec spec_;
  double noise_std_;
  Rng noise_rng_;
  bool done_ = true;
};

MatrixGameEnv build_assurance_game(double alpha);
MatrixGameEnv build_nonmonotonic_game(double alpha);

}  // namespace mansa
