#include "mansa/independent_q.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "mansa/text_format.hpp"

namespace mansa {

IndependentQ::IndependentQ(std::vector<int> action_counts, double learning_rate, double initial_value)
    : action_counts_(std::move(action_counts)),
      learning_rate_(learning_rate),
      initial_value_(initial_value),
      tables_(action_counts_.size()) {
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw ConfigError("iql: learning rate must lie in (0,1]");
  }
  if (!std::isfinite(initial_value)) throw ConfigError("iql: initial value must be finite");
}

std::vector<double>& IndependentQ::row(int agent, const Observation& obs) {
  auto& table = tables_[agent];
  auto it = table.find(obs);
  if (it == table.end()) {
    it = table.emplace(obs, std::vector<double>(action_counts_[agent], initial_value_)).first;
  }
  return it->second;
}

std::vector<double> IndependentQ::values(int agent, const Observation& obs) const {
  const auto& table = tables_.at(agent);
  auto it = table.find(obs);
  if (it == table.end()) return std::vector<double>(action_counts_[agent], initial_value_);
  return it->second;
}

double IndependentQ::value(int agent, const Observation& obs, int action) const {
  return values(agent, obs).at(action);
}

void IndependentQ::set_value(int agent, const Observation& obs, int action, double value) {
  row(agent, obs).at(action) = value;
}

int IndependentQ::greedy_action(int agent, const Observation& obs) const {
  const auto& table = tables_[agent];
  auto it = table.find(obs);
  if (it == table.end()) return 0;
  return argmax(it->second);
}

JointAction IndependentQ::greedy(const std::vector<Observation>& observations) const {
  JointAction a(action_counts_.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = greedy_action(static_cast<int>(i), observations[i]);
  return a;
}

JointAction IndependentQ::act(const std::vector<Observation>& observations, double epsilon,
                              Rng& rng) const {
  JointAction a(action_counts_.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (uniform01(rng) < epsilon) {
      a[i] = uniform_index(rng, action_counts_[i]);
    } else {
      a[i] = greedy_action(static_cast<int>(i), observations[i]);
    }
  }
  return a;
}

void IndependentQ::update(Batch batch, double gamma) {
  for (const TransitionRecord* rec : batch) {
    for (int i = 0; i < n_agents(); ++i) {
      double bootstrap = 0.0;
      if (!rec->terminal) {
        auto it = tables_[i].find(rec->next_observations[i]);
        if (it == tables_[i].end()) {
          bootstrap = initial_value_;
        } else {
          bootstrap = *std::max_element(it->second.begin(), it->second.end());
        }
      }
      double& q = row(i, rec->observations[i])[rec->action[i]];
      q += learning_rate_ * (rec->reward + gamma * bootstrap - q);
    }
  }
}

void IndependentQ::update(std::span<const TransitionRecord> records, double gamma) {
  auto ptrs = batch_of(records);
  update(Batch(ptrs), gamma);
}

void IndependentQ::write(std::ostream& out) const {
  for (int i = 0; i < n_agents(); ++i) {
    std::vector<std::string> lines;
    for (const auto& [obs, qs] : tables_[i]) {
      for (std::size_t a = 0; a < qs.size(); ++a) {
        lines.push_back("iql agent=" + std::to_string(i) + " obs=" + join_ints(obs) +
                        " action=" + std::to_string(a) + " value=" + format_double(qs[a]));
      }
    }
    std::sort(lines.begin(), lines.end());
    for (const auto& l : lines) out << l << '\n';
  }
}

}  // namespace mansa
