#pragma once

#include <iosfwd>
#include <unordered_map>
#include <vector>

#include "mansa/core.hpp"
#include "mansa/transition.hpp"

namespace mansa {

/// Independent Q-learning: one table per agent keyed by its local observation.
/// Every agent learns from the undifferentiated team reward.
class IndependentQ {
 public:
  IndependentQ(std::vector<int> action_counts, double learning_rate, double initial_value = 0.0);

  /// Per agent: argmax with probability 1 - epsilon, otherwise uniform.
  JointAction act(const std::vector<Observation>& observations, double epsilon, Rng& rng) const;
  JointAction greedy(const std::vector<Observation>& observations) const;

  void update(Batch batch, double gamma);
  void update(std::span<const TransitionRecord> records, double gamma);

  /// Unseen observations read as initial_value.
  std::vector<double> values(int agent, const Observation& obs) const;
  double value(int agent, const Observation& obs, int action) const;
  void set_value(int agent, const Observation& obs, int action, double value);

  int n_agents() const { return static_cast<int>(action_counts_.size()); }
  double learning_rate() const { return learning_rate_; }
  std::size_t table_size(int agent) const { return tables_[agent].size(); }

  /// Flat text, one entry per line, sorted:
  ///   iql agent=<i> obs=<v0,v1,...> action=<a> value=<q>
  void write(std::ostream& out) const;

 private:
  using Table = std::unordered_map<Observation, std::vector<double>, ObservationHash>;

  std::vector<double>& row(int agent, const Observation& obs);
  int greedy_action(int agent, const Observation& obs) const;

  std::vector<int> action_counts_;
  double learning_rate_;
  double initial_value_;
  std::vector<Table> tables_;
};

}  // namespace mansa
