#include "mansa/monotonic_q.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <string>

#include "mansa/text_format.hpp"

namespace mansa {

double mix(std::span<const double> utilities, std::span<const double> weights, double bias) {
  if (utilities.size() != weights.size()) throw ContractViolation("mix: length mismatch");
  double total = bias;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0.0) throw ContractViolation("mix: negative mixing weight");
    total += weights[i] * utilities[i];
  }
  return total;
}

MonotonicJointQ::MonotonicJointQ(std::vector<int> action_counts, double learning_rate,
                                 JointExploration exploration, double initial_value)
    : action_counts_(std::move(action_counts)),
      learning_rate_(learning_rate),
      exploration_(exploration),
      initial_utility_(action_counts_.empty() ? 0.0 : initial_value / static_cast<double>(action_counts_.size())) {
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw ConfigError("central: learning rate must lie in (0,1]");
  }
}

MonotonicJointQ::StateParams MonotonicJointQ::fresh() const {
  StateParams p;
  for (int count : action_counts_) p.utilities.emplace_back(count, initial_utility_);
  p.weights.assign(action_counts_.size(), 1.0);
  p.bias = 0.0;
  return p;
}

MonotonicJointQ::StateParams MonotonicJointQ::params(StateKey state) const {
  auto it = table_.find(state);
  return it == table_.end() ? fresh() : it->second;
}

MonotonicJointQ::StateParams& MonotonicJointQ::mutable_params(StateKey state) {
  auto it = table_.find(state);
  if (it == table_.end()) it = table_.emplace(state, fresh()).first;
  return it->second;
}

namespace {

double q_of(const MonotonicJointQ::StateParams& p, const JointAction& a) {
  double total = p.bias;
  for (std::size_t i = 0; i < p.weights.size(); ++i) total += p.weights[i] * p.utilities[i][a[i]];
  return total;
}

double max_q_of(const MonotonicJointQ::StateParams& p) {
  double total = p.bias;
  for (std::size_t i = 0; i < p.weights.size(); ++i) {
    total += p.weights[i] * *std::max_element(p.utilities[i].begin(), p.utilities[i].end());
  }
  return total;
}

}  // namespace

double MonotonicJointQ::q_total(StateKey state, const JointAction& action) const {
  auto it = table_.find(state);
  return it == table_.end() ? q_of(fresh(), action) : q_of(it->second, action);
}

double MonotonicJointQ::max_q_total(StateKey state) const {
  auto it = table_.find(state);
  return it == table_.end() ? max_q_of(fresh()) : max_q_of(it->second);
}

JointAction MonotonicJointQ::greedy(StateKey state) const {
  JointAction a(action_counts_.size(), 0);
  auto it = table_.find(state);
  if (it == table_.end()) return a;
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = argmax(it->second.utilities[i]);
  return a;
}

JointAction MonotonicJointQ::act(StateKey state, double epsilon, Rng& rng) const {
  JointAction a = greedy(state);
  if (exploration_ == JointExploration::joint) {
    if (uniform01(rng) < epsilon) {
      for (std::size_t i = 0; i < a.size(); ++i) a[i] = uniform_index(rng, action_counts_[i]);
    }
  } else {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (uniform01(rng) < epsilon) a[i] = uniform_index(rng, action_counts_[i]);
    }
  }
  return a;
}

void MonotonicJointQ::update(Batch batch, double gamma) {
  for (const TransitionRecord* rec : batch) {
    double bootstrap = rec->terminal ? 0.0 : max_q_total(rec->next_state);
    StateParams& p = mutable_params(rec->state);
    const double td = rec->reward + gamma * bootstrap - q_of(p, rec->action);
    if (td == 0.0) continue;
    // Normalized step: to first order Q_tot moves by learning_rate * td no
    // matter how large the bilinear parameters have grown.
    double grad_sq = 1.0;
    for (std::size_t i = 0; i < p.weights.size(); ++i) {
      const double u = p.utilities[i][rec->action[i]];
      grad_sq += p.weights[i] * p.weights[i] + u * u;
    }
    const double step = learning_rate_ * td / grad_sq;
    for (std::size_t i = 0; i < p.weights.size(); ++i) {
      double& u = p.utilities[i][rec->action[i]];
      const double w = p.weights[i];
      const double u_old = u;
      u += step * w;
      p.weights[i] = std::max(0.0, w + step * u_old);
    }
    p.bias += step;
  }
}

void MonotonicJointQ::update(std::span<const TransitionRecord> records, double gamma) {
  auto ptrs = batch_of(records);
  update(Batch(ptrs), gamma);
}

void MonotonicJointQ::write(std::ostream& out) const {
  std::map<StateKey, const StateParams*> sorted;
  for (const auto& [k, p] : table_) sorted.emplace(k, &p);
  for (const auto& [k, p] : sorted) {
    const std::string prefix = "central state=" + std::to_string(k);
    for (std::size_t i = 0; i < p->weights.size(); ++i) {
      for (std::size_t a = 0; a < p->utilities[i].size(); ++a) {
        out << prefix << " agent=" << i << " action=" << a
            << " utility=" << format_double(p->utilities[i][a]) << '\n';
      }
      out << prefix << " agent=" << i << " weight=" << format_double(p->weights[i]) << '\n';
    }
    out << prefix << " bias=" << format_double(p->bias) << '\n';
  }
}

}  // namespace mansa
