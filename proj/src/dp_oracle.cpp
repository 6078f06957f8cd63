#include "mansa/dp_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "json.hpp"

namespace mansa {
namespace {

double expected_next(const FiniteMDP& mdp, int s, int a, std::span<const double> values) {
  const auto& row = mdp.transitions[s][a];
  double total = 0.0;
  for (int t = 0; t < mdp.state_count; ++t) total += row[t] * values[t];
  return total;
}

double max_direct(const FiniteMDP& mdp, const std::vector<double>& q_row, int s) {
  double best = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < mdp.joint_action_count; ++a) {
    if (mdp.allowed(s, a)) best = std::max(best, q_row[a]);
  }
  return best;
}

double sup_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

double stop_threshold(double tolerance, double gamma) {
  if (gamma == 0.0) return std::numeric_limits<double>::infinity();
  return tolerance * (1.0 - gamma) / gamma;
}

// Dense Gaussian elimination with partial pivoting; solves m * x = rhs in place.
std::vector<double> solve_linear(std::vector<std::vector<double>> m, std::vector<double> rhs) {
  const int n = static_cast<int>(rhs.size());
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    }
    std::swap(m[col], m[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    const double d = m[col][col];
    for (int r = col + 1; r < n; ++r) {
      const double f = m[r][col] / d;
      if (f == 0.0) continue;
      for (int k = col; k < n; ++k) m[r][k] -= f * m[col][k];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> x(n);
  for (int r = n - 1; r >= 0; --r) {
    double acc = rhs[r];
    for (int k = r + 1; k < n; ++k) acc -= m[r][k] * x[k];
    x[r] = acc / m[r][r];
  }
  return x;
}

}  // namespace

void validate(const FiniteMDP& mdp) {
  const int S = mdp.state_count;
  const int A = mdp.joint_action_count;
  if (S < 1 || A < 1) throw ConfigError("mdp: needs at least one state and one joint action");
  if (!(mdp.discount >= 0.0 && mdp.discount < 1.0)) throw ConfigError("mdp: discount must lie in [0,1)");
  if (static_cast<int>(mdp.transitions.size()) != S || static_cast<int>(mdp.rewards.size()) != S ||
      static_cast<int>(mdp.terminal.size()) != S) {
    throw ConfigError("mdp: per-state arrays have the wrong length");
  }
  if (!mdp.direct_allowed.empty() && static_cast<int>(mdp.direct_allowed.size()) != S) {
    throw ConfigError("mdp: direct_allowed has the wrong length");
  }
  for (int s = 0; s < S; ++s) {
    if (static_cast<int>(mdp.transitions[s].size()) != A || static_cast<int>(mdp.rewards[s].size()) != A) {
      throw ConfigError("mdp: state " + std::to_string(s) + " has the wrong action count");
    }
    bool any_allowed = false;
    for (int a = 0; a < A; ++a) {
      if (!std::isfinite(mdp.rewards[s][a])) throw ConfigError("mdp: non-finite reward");
      const auto& row = mdp.transitions[s][a];
      if (static_cast<int>(row.size()) != S) throw ConfigError("mdp: transition row has the wrong length");
      double sum = 0.0;
      for (double p : row) {
        if (!(p >= 0.0)) throw ConfigError("mdp: negative transition probability");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-12) {
        throw ConfigError("mdp: transition row (" + std::to_string(s) + "," + std::to_string(a) +
                          ") does not sum to 1");
      }
      if (!mdp.direct_allowed.empty() && static_cast<int>(mdp.direct_allowed[s].size()) != A) {
        throw ConfigError("mdp: direct_allowed row has the wrong length");
      }
      any_allowed = any_allowed || mdp.allowed(s, a);
    }
    if (!any_allowed) throw ConfigError("mdp: state " + std::to_string(s) + " has no direct action");
  }
}

void validate(const CentralPolicy& policy, const FiniteMDP& mdp) {
  if (static_cast<int>(policy.size()) != mdp.state_count) {
    throw ConfigError("central policy must give one action per state");
  }
  for (int a : policy) {
    if (a < 0 || a >= mdp.joint_action_count) throw ConfigError("central policy action out of range");
  }
}

QTable action_values(std::span<const double> values, const FiniteMDP& mdp) {
  QTable q(mdp.state_count, std::vector<double>(mdp.joint_action_count, 0.0));
  for (int s = 0; s < mdp.state_count; ++s) {
    if (mdp.terminal[s]) continue;
    for (int a = 0; a < mdp.joint_action_count; ++a) {
      q[s][a] = mdp.rewards[s][a] + mdp.discount * expected_next(mdp, s, a, values);
    }
  }
  return q;
}

double intervention_value(const QTable& q, const CentralPolicy& central, double c, int s) {
  return q.at(s).at(central.at(s)) - c;
}

std::vector<double> bellman_backup(std::span<const double> values, const FiniteMDP& mdp,
                                   const CentralPolicy& central, double c) {
  const QTable q = action_values(values, mdp);
  std::vector<double> out(mdp.state_count, 0.0);
  for (int s = 0; s < mdp.state_count; ++s) {
    if (mdp.terminal[s]) continue;
    out[s] = std::max(intervention_value(q, central, c, s), max_direct(mdp, q[s], s));
  }
  return out;
}

std::vector<bool> heaviside_policy(const QTable& q, const CentralPolicy& central, double c,
                                   const std::vector<std::vector<bool>>& direct_allowed) {
  std::vector<bool> g(q.size(), false);
  for (std::size_t s = 0; s < q.size(); ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < q[s].size(); ++a) {
      if (direct_allowed.empty() || direct_allowed[s][a]) best = std::max(best, q[s][a]);
    }
    g[s] = intervention_value(q, central, c, static_cast<int>(s)) - best > 0.0;
  }
  return g;
}

SwitchSolution solve_switching(const FiniteMDP& mdp, const CentralPolicy& central, double c,
                               double tolerance, int max_iterations) {
  validate(mdp);
  validate(central, mdp);
  if (!(tolerance > 0.0)) throw ConfigError("solve_switching: tolerance must be positive");
  const double threshold = stop_threshold(tolerance, mdp.discount);

  SwitchSolution sol;
  sol.values.assign(mdp.state_count, 0.0);
  for (int it = 1; it <= max_iterations; ++it) {
    std::vector<double> next = bellman_backup(sol.values, mdp, central, c);
    sol.residual = sup_distance(next, sol.values);
    sol.values = std::move(next);
    sol.iterations = it;
    if (sol.residual <= threshold) break;
  }
  if (sol.residual > threshold) {
    throw InvariantViolation("solve_switching: no convergence within the iteration cap");
  }
  sol.q_values = action_values(sol.values, mdp);
  sol.intervention_values.resize(mdp.state_count);
  for (int s = 0; s < mdp.state_count; ++s) {
    sol.intervention_values[s] = mdp.terminal[s] ? 0.0 : intervention_value(sol.q_values, central, c, s);
  }
  sol.activation_set = heaviside_policy(sol.q_values, central, c, mdp.direct_allowed);
  for (int s = 0; s < mdp.state_count; ++s) {
    if (mdp.terminal[s]) sol.activation_set[s] = false;
  }
  return sol;
}

std::vector<double> evaluate_augmented_policy(const FiniteMDP& mdp, const CentralPolicy& central,
                                              double c, const std::vector<int>& policy) {
  const int S = mdp.state_count;
  std::vector<std::vector<double>> m(S, std::vector<double>(S, 0.0));
  std::vector<double> rhs(S, 0.0);
  for (int s = 0; s < S; ++s) {
    m[s][s] = 1.0;
    if (mdp.terminal[s]) continue;
    const bool intervene = policy[s] == mdp.joint_action_count;
    const int a = intervene ? central[s] : policy[s];
    rhs[s] = mdp.rewards[s][a] - (intervene ? c : 0.0);
    for (int t = 0; t < S; ++t) {
      if (!mdp.terminal[t]) m[s][t] -= mdp.discount * mdp.transitions[s][a][t];
    }
  }
  return solve_linear(std::move(m), std::move(rhs));
}

BruteForceResult brute_force_switching(const FiniteMDP& mdp, const CentralPolicy& central, double c,
                                       std::size_t max_policies) {
  validate(mdp);
  validate(central, mdp);
  const int S = mdp.state_count;
  const int A = mdp.joint_action_count;

  std::vector<std::vector<int>> choices(S);
  std::size_t total = 1;
  for (int s = 0; s < S; ++s) {
    if (mdp.terminal[s]) {
      choices[s] = {0};
    } else {
      for (int a = 0; a < A; ++a) {
        if (mdp.allowed(s, a)) choices[s].push_back(a);
      }
      choices[s].push_back(A);
    }
    if (total > max_policies / choices[s].size()) {
      throw ConfigError("brute_force_switching: policy enumeration exceeds the cap");
    }
    total *= choices[s].size();
  }

  std::vector<std::vector<double>> all_values;
  std::vector<std::vector<int>> all_policies;
  all_values.reserve(total);
  all_policies.reserve(total);
  std::vector<std::size_t> digit(S, 0);
  std::vector<int> policy(S);
  for (std::size_t k = 0; k < total; ++k) {
    for (int s = 0; s < S; ++s) policy[s] = choices[s][digit[s]];
    all_values.push_back(evaluate_augmented_policy(mdp, central, c, policy));
    all_policies.push_back(policy);
    for (int s = 0; s < S; ++s) {
      if (++digit[s] < choices[s].size()) break;
      digit[s] = 0;
    }
  }

  BruteForceResult out;
  out.policies_evaluated = total;
  out.values.assign(S, -std::numeric_limits<double>::infinity());
  for (const auto& v : all_values) {
    for (int s = 0; s < S; ++s) out.values[s] = std::max(out.values[s], v[s]);
  }
  int fewest = std::numeric_limits<int>::max();
  for (std::size_t k = 0; k < total; ++k) {
    bool optimal = true;
    for (int s = 0; s < S && optimal; ++s) optimal = all_values[k][s] >= out.values[s] - 1e-9;
    if (!optimal) continue;
    int interventions = 0;
    for (int s = 0; s < S; ++s) interventions += !mdp.terminal[s] && all_policies[k][s] == A;
    if (interventions < fewest) {
      fewest = interventions;
      out.policy = all_policies[k];
    }
  }
  out.activation_set.assign(S, false);
  for (int s = 0; s < S; ++s) out.activation_set[s] = !mdp.terminal[s] && out.policy[s] == A;
  return out;
}

BudgetedSolution solve_budgeted(const FiniteMDP& mdp, const CentralPolicy& central, double c, int n,
                                double tolerance, int max_iterations) {
  validate(mdp);
  validate(central, mdp);
  if (n < 0) throw ConfigError("solve_budgeted: budget must be non-negative");
  if (!(tolerance > 0.0)) throw ConfigError("solve_budgeted: tolerance must be positive");
  const int S = mdp.state_count;
  const double threshold = stop_threshold(tolerance, mdp.discount);

  BudgetedSolution sol;
  sol.budget = n;
  sol.values.assign(n + 1, std::vector<double>(S, 0.0));
  sol.activation_set.assign(n + 1, std::vector<bool>(S, false));
  for (int it = 1; it <= max_iterations; ++it) {
    double residual = 0.0;
    std::vector<std::vector<double>> next(n + 1, std::vector<double>(S, 0.0));
    for (int x = 0; x <= n; ++x) {
      const QTable q = action_values(sol.values[x], mdp);
      QTable q_spent;
      if (x > 0) q_spent = action_values(sol.values[x - 1], mdp);
      for (int s = 0; s < S; ++s) {
        if (mdp.terminal[s]) continue;
        const double direct = max_direct(mdp, q[s], s);
        double v = direct;
        bool activate = false;
        if (x > 0) {
          const double intervene = q_spent[s][central[s]] - c;
          activate = intervene - direct > 0.0;
          if (activate) v = intervene;
        }
        next[x][s] = v;
        sol.activation_set[x][s] = activate;
        residual = std::max(residual, std::abs(v - sol.values[x][s]));
      }
    }
    sol.values = std::move(next);
    sol.iterations = it;
    sol.residual = residual;
    if (residual <= threshold) break;
  }
  if (sol.residual > threshold) {
    throw InvariantViolation("solve_budgeted: no convergence within the iteration cap");
  }
  return sol;
}

RolloutStats simulate_budgeted(const FiniteMDP& mdp, const CentralPolicy& central, double c,
                               const BudgetedSolution& solution, int start, int max_steps, Rng& rng) {
  RolloutStats stats;
  int s = start;
  int x = solution.budget;
  double discount = 1.0;
  const QTable* q = nullptr;
  QTable cache;
  int cached_x = -1;
  while (stats.steps < max_steps && !mdp.terminal[s]) {
    if (cached_x != x) {
      cache = action_values(solution.values[x], mdp);
      cached_x = x;
    }
    q = &cache;
    int a = 0;
    double reward = 0.0;
    if (solution.activation_set[x][s]) {
      if (x <= 0) throw InvariantViolation("simulate_budgeted: activation with empty budget");
      a = central[s];
      reward = mdp.rewards[s][a] - c;
      --x;
      ++stats.activations;
    } else {
      double best = -std::numeric_limits<double>::infinity();
      for (int b = 0; b < mdp.joint_action_count; ++b) {
        if (mdp.allowed(s, b) && (*q)[s][b] > best) {
          best = (*q)[s][b];
          a = b;
        }
      }
      reward = mdp.rewards[s][a];
    }
    stats.discounted_return += discount * reward;
    discount *= mdp.discount;
    std::discrete_distribution<int> next(mdp.transitions[s][a].begin(), mdp.transitions[s][a].end());
    s = next(rng);
    ++stats.steps;
  }
  return stats;
}

MdpFixture load_mdp_fixture(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("mdp fixture: ") + e.what());
  }
  static const std::vector<std::string> known = {"discount", "states", "joint_actions", "terminal",
                                                 "rewards", "transitions", "central_policy",
                                                 "direct_allowed"};
  for (const auto& item : j.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      throw ConfigError("mdp fixture: unknown key '" + item.key() + "'");
    }
  }
  try {
    MdpFixture f;
    f.mdp.discount = j.at("discount").get<double>();
    f.mdp.state_count = j.at("states").get<int>();
    f.mdp.joint_action_count = j.at("joint_actions").get<int>();
    f.mdp.rewards = j.at("rewards").get<std::vector<std::vector<double>>>();
    f.mdp.transitions = j.at("transitions").get<std::vector<std::vector<std::vector<double>>>>();
    f.mdp.terminal = j.contains("terminal") ? j.at("terminal").get<std::vector<bool>>()
                                            : std::vector<bool>(f.mdp.state_count, false);
    if (j.contains("direct_allowed")) {
      f.mdp.direct_allowed = j.at("direct_allowed").get<std::vector<std::vector<bool>>>();
    }
    f.central = j.at("central_policy").get<std::vector<int>>();
    validate(f.mdp);
    validate(f.central, f.mdp);
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("mdp fixture: ") + e.what());
  }
}

MdpFixture load_mdp_fixture_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open mdp fixture '" + path + "'");
  return load_mdp_fixture(in);
}

}  // namespace mansa
