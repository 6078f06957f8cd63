#pragma once

#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

#include "mansa/core.hpp"
#include "mansa/transition.hpp"

namespace mansa {

/// bias + sum_i weights[i] * utilities[i]. Throws ContractViolation on a
/// negative weight or mismatched lengths.
double mix(std::span<const double> utilities, std::span<const double> weights, double bias);

/// How the centralized controller explores.
enum class JointExploration {
  joint,      // with probability epsilon, a uniformly random joint action
  per_agent,  // each agent's coordinate explores independently, as in IQL
};

/// Tabular monotonic value factorization keyed by global state:
///   Q_tot(s, a) = bias(s) + sum_i weight(s, i) * utility_i(s, a_i),  weight >= 0.
///
/// Because the mixing is non-negative, the greedy joint action is the tuple of
/// per-agent utility argmaxes. Unseen states start at weights 1, bias 0 and
/// every utility equal to initial_value / n_agents, so Q_tot starts at
/// initial_value everywhere.
class MonotonicJointQ {
 public:
  struct StateParams {
    std::vector<std::vector<double>> utilities;
    std::vector<double> weights;
    double bias = 0.0;
  };

  MonotonicJointQ(std::vector<int> action_counts, double learning_rate,
                  JointExploration exploration = JointExploration::joint,
                  double initial_value = 0.0);

  double q_total(StateKey state, const JointAction& action) const;
  /// max over joint actions, computed through the per-agent decomposition.
  double max_q_total(StateKey state) const;

  JointAction greedy(StateKey state) const;
  JointAction act(StateKey state, double epsilon, Rng& rng) const;

  /// Squared-error gradient step toward r + gamma * max Q_tot(s'), scaled by
  /// the inverse squared gradient norm, followed by clamping the weights at zero.
  void update(Batch batch, double gamma);
  void update(std::span<const TransitionRecord> records, double gamma);

  StateParams params(StateKey state) const;
  StateParams& mutable_params(StateKey state);

  int n_agents() const { return static_cast<int>(action_counts_.size()); }
  std::size_t table_size() const { return table_.size(); }
  JointExploration exploration() const { return exploration_; }

  /// Flat text, sorted by state:
  ///   central state=<s> agent=<i> action=<a> utility=<u>
  ///   central state=<s> agent=<i> weight=<w>
  ///   central state=<s> bias=<b>
  void write(std::ostream& out) const;

 private:
  StateParams fresh() const;

  std::vector<int> action_counts_;
  double learning_rate_;
  JointExploration exploration_;
  double initial_utility_;
  std::unordered_map<StateKey, StateParams> table_;
};

}  // namespace mansa
