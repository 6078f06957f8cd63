#include "mansa/switch_controller.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "mansa/text_format.hpp"

namespace mansa {

BudgetState budget_tick(BudgetState budget, int g) {
  if (g != 0 && g != 1) throw ContractViolation("budget_tick: g must be 0 or 1");
  if (budget.remaining - g < 0) throw InvariantViolation("activation budget exceeded");
  budget.remaining -= g;
  return budget;
}

std::size_t AugmentedKeyHash::operator()(const AugmentedKey& k) const noexcept {
  return static_cast<std::size_t>(mix_seed(k.state, static_cast<std::uint64_t>(k.remaining)));
}

AugmentedKey augment_state(StateKey state, const BudgetState& budget, bool budget_mode) {
  return {state, budget_mode ? budget.remaining : -1};
}

GlobalQ::GlobalQ(double switching_cost, double learning_rate, bool budget_mode)
    : switching_cost_(switching_cost), learning_rate_(learning_rate), budget_mode_(budget_mode) {
  if (!(switching_cost >= 0.0) || !std::isfinite(switching_cost)) {
    throw ConfigError("global: switching cost must be a finite non-negative number");
  }
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw ConfigError("global: learning rate must lie in (0,1]");
  }
}

double GlobalQ::value(const AugmentedKey& key, int g) const {
  auto it = table_.find(key);
  return it == table_.end() ? 0.0 : it->second.at(g);
}

void GlobalQ::set_value(const AugmentedKey& key, int g, double v) { table_[key].at(g) = v; }

double GlobalQ::activation_probability(const AugmentedKey& key, double temperature) const {
  if (!(temperature > 0.0)) throw ContractViolation("global: temperature must be positive");
  if (masked(key)) return 0.0;
  const double diff = (value(key, 1) - value(key, 0)) / temperature;
  // Logistic form of the two-way softmax, stable for large |diff|.
  if (diff >= 0.0) return 1.0 / (1.0 + std::exp(-diff));
  const double e = std::exp(diff);
  return e / (1.0 + e);
}

int GlobalQ::act(const AugmentedKey& key, double temperature, Rng& rng) const {
  const double p = activation_probability(key, temperature);
  return uniform01(rng) < p ? 1 : 0;
}

int GlobalQ::greedy(const AugmentedKey& key) const {
  if (masked(key)) return 0;
  return value(key, 1) > value(key, 0) ? 1 : 0;
}

double GlobalQ::best_value(const AugmentedKey& key) const {
  if (masked(key)) return value(key, 0);
  return std::max(value(key, 0), value(key, 1));
}

void GlobalQ::update(Batch batch, double gamma) {
  for (const TransitionRecord* rec : batch) {
    const AugmentedKey key{rec->state, budget_mode_ ? rec->budget_before : -1};
    const AugmentedKey next{rec->next_state, budget_mode_ ? rec->budget_after : -1};
    const int g = rec->switch_decision;
    const double bootstrap = rec->terminal ? 0.0 : best_value(next);
    double& q = table_[key][g];
    q += learning_rate_ * (rec->reward - switching_cost_ * g + gamma * bootstrap - q);
  }
}

void GlobalQ::update(std::span<const TransitionRecord> records, double gamma) {
  auto ptrs = batch_of(records);
  update(Batch(ptrs), gamma);
}

void GlobalQ::write(std::ostream& out) const {
  std::map<std::pair<StateKey, std::int64_t>, std::array<double, 2>> sorted;
  for (const auto& [k, v] : table_) sorted.emplace(std::make_pair(k.state, k.remaining), v);
  for (const auto& [k, v] : sorted) {
    for (int g = 0; g < 2; ++g) {
      out << "global state=" << k.first << " remaining=" << k.second << " g=" << g
          << " value=" << format_double(v[g]) << '\n';
    }
  }
}

double discounted_switch_objective(std::span<const TransitionRecord> rollout, double gamma, double c) {
  double total = 0.0;
  double discount = 1.0;
  for (const auto& rec : rollout) {
    total += discount * (rec.reward - c * rec.switch_decision);
    discount *= gamma;
  }
  return total;
}

}  // namespace mansa
