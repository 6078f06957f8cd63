#pragma once

#include <vector>

#include "mansa/core.hpp"
#include "mansa/dp_oracle.hpp"

namespace mansa::testing {

struct RandomMdpShape {
  int min_states = 1;
  int max_states = 4;
  int min_actions = 2;
  int max_actions = 4;
  double discount = 0.9;
  bool terminal_states = false;
  bool restrict_direct = false;
};

inline double draw(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

// Dense random rows; a handful of zero entries keeps some structure sparse.
inline MdpFixture random_mdp(Rng& rng, const RandomMdpShape& shape) {
  MdpFixture fx;
  FiniteMDP& m = fx.mdp;
  m.state_count = shape.min_states + uniform_index(rng, shape.max_states - shape.min_states + 1);
  m.joint_action_count = shape.min_actions + uniform_index(rng, shape.max_actions - shape.min_actions + 1);
  m.discount = shape.discount;
  m.terminal.assign(m.state_count, false);
  if (shape.terminal_states && m.state_count > 1 && uniform01(rng) < 0.5) {
    m.terminal[m.state_count - 1] = true;
  }
  m.rewards.assign(m.state_count, std::vector<double>(m.joint_action_count));
  m.transitions.assign(m.state_count,
                       std::vector<std::vector<double>>(m.joint_action_count, std::vector<double>(m.state_count)));
  for (int s = 0; s < m.state_count; ++s) {
    for (int a = 0; a < m.joint_action_count; ++a) {
      m.rewards[s][a] = draw(rng, -1.0, 1.0);
      double sum = 0.0;
      for (int t = 0; t < m.state_count; ++t) {
        double p = uniform01(rng) < 0.3 ? 0.0 : uniform01(rng);
        m.transitions[s][a][t] = p;
        sum += p;
      }
      if (sum == 0.0) {
        m.transitions[s][a][uniform_index(rng, m.state_count)] = 1.0;
        continue;
      }
      for (double& p : m.transitions[s][a]) p /= sum;
      // Push rounding residue into the largest entry so each row sums to 1.
      double total = 0.0;
      int big = 0;
      for (int t = 0; t < m.state_count; ++t) {
        total += m.transitions[s][a][t];
        if (m.transitions[s][a][t] > m.transitions[s][a][big]) big = t;
      }
      m.transitions[s][a][big] += 1.0 - total;
    }
  }
  fx.central.resize(m.state_count);
  for (int s = 0; s < m.state_count; ++s) fx.central[s] = uniform_index(rng, m.joint_action_count);
  if (shape.restrict_direct) {
    m.direct_allowed.assign(m.state_count, std::vector<bool>(m.joint_action_count, true));
    for (int s = 0; s < m.state_count; ++s) {
      if (uniform01(rng) < 0.5) m.direct_allowed[s][fx.central[s]] = false;
      bool any = false;
      for (int a = 0; a < m.joint_action_count; ++a) any = any || m.direct_allowed[s][a];
      if (!any) m.direct_allowed[s][(fx.central[s] + 1) % m.joint_action_count] = true;
    }
  }
  return fx;
}

}  // namespace mansa::testing
