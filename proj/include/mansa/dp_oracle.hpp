#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mansa/core.hpp"

namespace mansa {

/// Finite MDP over flattened joint actions, in exact form.
///
/// `direct_allowed` optionally restricts which joint actions the
/// non-intervention branch may take in each state (empty = all). The
/// intervention branch always plays the central policy's action.
struct FiniteMDP {
  int state_count = 0;
  int joint_action_count = 0;
  std::vector<std::vector<std::vector<double>>> transitions;  // [s][a][s']
  std::vector<std::vector<double>> rewards;                   // [s][a]
  double discount = 0.9;
  std::vector<bool> terminal;
  std::vector<std::vector<bool>> direct_allowed;

  bool allowed(int s, int a) const { return direct_allowed.empty() || direct_allowed[s][a]; }
};

/// Throws ConfigError on shape errors, rows not summing to 1 (1e-12), non-finite
/// rewards, a discount outside [0,1), or a state with no allowed direct action.
void validate(const FiniteMDP& mdp);

/// Central controller's joint action per state.
using CentralPolicy = std::vector<int>;
void validate(const CentralPolicy& policy, const FiniteMDP& mdp);

using QTable = std::vector<std::vector<double>>;  // [s][a]

/// Q(s, a) = R(s, a) + gamma * sum_s' P(s'|s, a) v(s'); rows of terminal states are 0.
QTable action_values(std::span<const double> values, const FiniteMDP& mdp);

/// Q(s, central(s)) - c.
double intervention_value(const QTable& q, const CentralPolicy& central, double c, int s);

/// One application of the switching Bellman operator:
///   v'(s) = max( Q(s, central(s)) - c, max_a Q(s, a) ),   v'(terminal) = 0.
std::vector<double> bellman_backup(std::span<const double> values, const FiniteMDP& mdp,
                                   const CentralPolicy& central, double c);

/// g(s) = 1 iff intervention_value(s) - max_a q(s, a) > 0 (ties give 0). The
/// max ranges over `direct_allowed` when given.
std::vector<bool> heaviside_policy(const QTable& q, const CentralPolicy& central, double c,
                                   const std::vector<std::vector<bool>>& direct_allowed = {});

struct SwitchSolution {
  std::vector<double> values;
  QTable q_values;
  std::vector<double> intervention_values;
  std::vector<bool> activation_set;
  int iterations = 0;
  double residual = 0.0;
};

/// Value iteration from v = 0 until the sup-norm step is at most
/// tolerance * (1 - gamma) / gamma, which bounds the final error by tolerance.
SwitchSolution solve_switching(const FiniteMDP& mdp, const CentralPolicy& central, double c,
                               double tolerance, int max_iterations = 1'000'000);

/// Augmented choice index `joint_action_count` means "intervene".
struct BruteForceResult {
  std::vector<double> values;
  std::vector<int> policy;
  std::vector<bool> activation_set;
  std::size_t policies_evaluated = 0;
};

/// Enumerates every deterministic stationary augmented policy, evaluates it
/// by solving the linear policy-evaluation system, and keeps the per-state
/// maximum. Among optimal policies (within 1e-9) the one with the fewest
/// interventions is reported. Throws ConfigError beyond `max_policies`.
BruteForceResult brute_force_switching(const FiniteMDP& mdp, const CentralPolicy& central, double c,
                                       std::size_t max_policies = 1'000'000);

/// Exact values of a fixed augmented policy (same encoding as BruteForceResult).
std::vector<double> evaluate_augmented_policy(const FiniteMDP& mdp, const CentralPolicy& central,
                                              double c, const std::vector<int>& policy);

/// Budget-augmented solution over X = S x {0..n}; indices are [x][s].
struct BudgetedSolution {
  int budget = 0;
  std::vector<std::vector<double>> values;
  std::vector<std::vector<bool>> activation_set;
  int iterations = 0;
  double residual = 0.0;
};

/// Value iteration on (s, x): intervening at x > 0 moves the budget to x - 1;
/// x = 0 forbids intervening.
BudgetedSolution solve_budgeted(const FiniteMDP& mdp, const CentralPolicy& central, double c, int n,
                                double tolerance, int max_iterations = 1'000'000);

struct RolloutStats {
  int activations = 0;
  int steps = 0;
  double discounted_return = 0.0;
};

/// Follows the greedy budgeted policy from (start, n), sampling transitions.
RolloutStats simulate_budgeted(const FiniteMDP& mdp, const CentralPolicy& central, double c,
                               const BudgetedSolution& solution, int start, int max_steps, Rng& rng);

struct MdpFixture {
  FiniteMDP mdp;
  CentralPolicy central;
};

/// JSON fixture:
///   { "discount": g, "states": S, "joint_actions": A,
///     "terminal": [bool x S]            (optional, default all false),
///     "rewards": [[R(s,a)] x S],
///     "transitions": [[[P(s'|s,a)] x A] x S],
///     "central_policy": [a x S],
///     "direct_allowed": [[bool x A] x S] (optional) }
MdpFixture load_mdp_fixture(std::istream& in);
MdpFixture load_mdp_fixture_file(const std::string& path);

}  // namespace mansa
