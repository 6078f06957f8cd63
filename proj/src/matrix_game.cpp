#include "mansa/matrix_game.hpp"

#include <cmath>
#include <string>

namespace mansa {
namespace {

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError("alpha must lie in [0,1], got " + std::to_string(alpha));
  }
}

}  // namespace

PayoffMatrix PayoffMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.size() != 2 || rows[0].size() != 2 || rows[1].size() != 2) {
    throw ConfigError("payoff matrix must be 2x2");
  }
  PayoffMatrix m;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) m.entries[i][j] = rows[i][j];
  }
  return m;
}

PayoffMatrix compose_matrix_game(const PayoffMatrix& coupled, const PayoffMatrix& decoupled,
                                 double alpha) {
  check_alpha(alpha);
  PayoffMatrix out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      out.entries[i][j] = alpha * decoupled.entries[i][j] + (1.0 - alpha) * coupled.entries[i][j];
    }
  }
  return out;
}

AlphaGameSpec assurance_spec(double alpha) {
  check_alpha(alpha);
  return {GameKind::assurance, alpha, PayoffMatrix{{{{5.0, 0.0}, {0.0, -2.0}}}},
          PayoffMatrix{{{{10.0, 10.0}, {10.0, 10.0}}}}};
}

// [[2a, 1], [1, 8]] written as a blend of its monotonic (a = 0) and
// non-monotonic (a = 1) endpoints.
AlphaGameSpec nonmonotonic_spec(double alpha) {
  check_alpha(alpha);
  return {GameKind::nonmonotonic, alpha, PayoffMatrix{{{{0.0, 1.0}, {1.0, 8.0}}}},
          PayoffMatrix{{{{2.0, 1.0}, {1.0, 8.0}}}}};
}

MatrixGameEnv::MatrixGameEnv(AlphaGameSpec game, double reward_noise_std, double discount)
    : game_(game),
      payoff_(compose_matrix_game(game.coupled, game.decoupled, game.alpha)),
      noise_std_(reward_noise_std) {
  if (!(reward_noise_std >= 0.0)) throw ConfigError("reward noise std must be >= 0");
  const char* kind = game.kind == GameKind::assurance      ? "assurance"
                     : game.kind == GameKind::nonmonotonic ? "nonmonotonic"
                                                            : "matrix";
  spec_ = EnvSpec{kind, 2, {2, 2}, 1, 1, discount};
  validate(spec_);
}

ResetResult MatrixGameEnv::reset(std::uint64_t seed) {
  noise_rng_.seed(seed);
  done_ = false;
  return {0, observations()};
}

StepOutcome MatrixGameEnv::step(const JointAction& joint_action) {
  check_joint_action(joint_action);
  double reward = payoff_(joint_action[0], joint_action[1]);
  if (noise_std_ > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_std_);
    reward += noise(noise_rng_);
  }
  done_ = true;
  return {reward, 0, observations(), true};
}

MatrixGameEnv build_assurance_game(double alpha) { return MatrixGameEnv(assurance_spec(alpha)); }

MatrixGameEnv build_nonmonotonic_game(double alpha) {
  return MatrixGameEnv(nonmonotonic_spec(alpha));
}

}  // namespace mansa
