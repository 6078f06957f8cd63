#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mansa/env.hpp"
#include "mansa/lbf.hpp"
#include "mansa/matrix_game.hpp"

using namespace mansa;

namespace {

PayoffMatrix payoff_of(double alpha, bool assurance) {
  return (assurance ? build_assurance_game(alpha) : build_nonmonotonic_game(alpha)).payoff();
}

double play(MatrixGameEnv env, int a0, int a1) {
  env.reset(7);
  return env.step({a0, a1}).team_reward;
}

}  // namespace

TEST_CASE("assurance payoffs at the endpoints and midpoint") {
  CHECK(payoff_of(0.0, true) == PayoffMatrix{{{{5, 0}, {0, -2}}}});
  CHECK(payoff_of(1.0, true) == PayoffMatrix{{{{10, 10}, {10, 10}}}});
  CHECK(payoff_of(0.5, true) == PayoffMatrix{{{{7.5, 5}, {5, 4}}}});
}

TEST_CASE("non-monotonic payoffs") {
  CHECK(payoff_of(1.0, false) == PayoffMatrix{{{{2, 1}, {1, 8}}}});
  CHECK(payoff_of(0.0, false) == PayoffMatrix{{{{0, 1}, {1, 8}}}});
  CHECK(payoff_of(0.5, false) == PayoffMatrix{{{{1, 1}, {1, 8}}}});
}

TEST_CASE("matrix game steps pay the table entry and end the episode") {
  CHECK(play(build_assurance_game(0.0), 0, 0) == 5.0);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) CHECK(play(build_assurance_game(1.0), a, b) == 10.0);
  }
  CHECK(play(build_nonmonotonic_game(1.0), 1, 1) == 8.0);

  MatrixGameEnv env = build_assurance_game(0.3);
  ResetResult r = env.reset(7);
  CHECK(r.state == 0);
  REQUIRE(r.observations.size() == 2);
  CHECK(r.observations[0].empty());
  CHECK(r.observations[1].empty());
  StepOutcome out = env.step({1, 0});
  CHECK(out.terminal);
  CHECK(out.observations.size() == 2);
  CHECK_THROWS_AS(env.step({0, 0}), ContractViolation);
}

TEST_CASE("compose reproduces the closed forms across alpha") {
  const PayoffMatrix a = PayoffMatrix::from_rows({{5, 0}, {0, -2}});
  const PayoffMatrix b = PayoffMatrix::from_rows({{10, 10}, {10, 10}});
  CHECK(compose_matrix_game(a, b, 1.0) == b);
  CHECK(compose_matrix_game(a, b, 0.0) == a);
  CHECK(compose_matrix_game(a, b, 0.5)(1, 1) == 4.0);
  for (int k = 0; k <= 1000; ++k) {
    const double alpha = k / 1000.0;
    const PayoffMatrix m = compose_matrix_game(a, b, alpha);
    CHECK(m(0, 0) == doctest::Approx(5 * (1 + alpha)).epsilon(1e-15));
    CHECK(m(0, 1) == doctest::Approx(10 * alpha).epsilon(1e-15));
    CHECK(m(1, 0) == doctest::Approx(10 * alpha).epsilon(1e-15));
    CHECK(m(1, 1) == doctest::Approx(12 * alpha - 2).epsilon(1e-15));
    CHECK(m.symmetric());
  }
}

TEST_CASE("bad inputs are rejected") {
  CHECK_THROWS_AS(build_assurance_game(-0.1), ConfigError);
  CHECK_THROWS_AS(build_nonmonotonic_game(1.5), ConfigError);
  CHECK_THROWS_AS(PayoffMatrix::from_rows({{1, 2, 3}, {4, 5, 6}}), ConfigError);
  CHECK_THROWS_AS(PayoffMatrix::from_rows({{1, 2}}), ConfigError);

  MatrixGameEnv env = build_assurance_game(0.0);
  CHECK_THROWS_AS(env.step({0, 0}), ContractViolation);  // never reset
  env.reset(1);
  CHECK_THROWS_AS(env.step({0, 2}), ContractViolation);
  CHECK_THROWS_AS(env.step({0}), ContractViolation);

  LbfConfig crowded;
  crowded.width = 2;
  crowded.height = 1;
  crowded.n_players = 2;
  crowded.n_foods = 1;
  CHECK_THROWS_AS(LbfEnv{crowded}, ConfigError);
}

TEST_CASE("env spec invariants") {
  EnvSpec spec{"x", 2, {2, 2}, 1, 1, 0.99};
  CHECK_NOTHROW(validate(spec));
  EnvSpec one_agent = spec;
  one_agent.n_agents = 1;
  one_agent.action_counts = {2};
  CHECK_THROWS_AS(validate(one_agent), ConfigError);
  EnvSpec one_action = spec;
  one_action.action_counts = {2, 1};
  CHECK_THROWS_AS(validate(one_action), ConfigError);
  EnvSpec undiscounted = spec;
  undiscounted.discount = 1.0;
  CHECK_THROWS_AS(validate(undiscounted), ConfigError);
}

TEST_CASE("reward noise is seeded by reset") {
  MatrixGameEnv env(assurance_spec(0.0), 0.5);
  MatrixGameEnv twin(assurance_spec(0.0), 0.5);
  double sum = 0.0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    env.reset(seed);
    twin.reset(seed);
    const double r = env.step({0, 0}).team_reward;
    CHECK(r == twin.step({0, 0}).team_reward);
    sum += r;
  }
  CHECK(sum / 2000 == doctest::Approx(5.0).epsilon(0.01));
}
