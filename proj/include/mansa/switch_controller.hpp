#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <unordered_map>

#include "mansa/core.hpp"
#include "mansa/transition.hpp"

namespace mansa {

/// Whole-run activation budget. `remaining` only ever decreases.
struct BudgetState {
  std::int64_t total = 0;
  std::int64_t remaining = 0;

  static BudgetState full(std::int64_t n) { return {n, n}; }
};

/// remaining - g. Throws InvariantViolation if that would go negative.
BudgetState budget_tick(BudgetState budget, int g);

/// Switch-controller state key: the global state, plus the remaining budget
/// in budget mode (remaining = -1 otherwise).
struct AugmentedKey {
  StateKey state = 0;
  std::int64_t remaining = -1;
  bool operator==(const AugmentedKey&) const = default;
};

struct AugmentedKeyHash {
  std::size_t operator()(const AugmentedKey& k) const noexcept;
};

AugmentedKey augment_state(StateKey state, const BudgetState& budget, bool budget_mode);

/// Tabular Q-learning over g in {0, 1} with switching cost c charged on g = 1.
/// Exploration is Boltzmann; in budget mode g = 1 is masked once the
/// remaining budget hits zero.
class GlobalQ {
 public:
  GlobalQ(double switching_cost, double learning_rate, bool budget_mode);

  /// P(g = 1) under Boltzmann(Q / temperature), after masking.
  double activation_probability(const AugmentedKey& key, double temperature) const;
  int act(const AugmentedKey& key, double temperature, Rng& rng) const;
  /// argmax with ties to 0, after masking.
  int greedy(const AugmentedKey& key) const;

  /// Q(key, g) += lr * [r - c * g + gamma * max_g' Q(key', g') - Q(key, g)].
  /// Keys are (state, budget_before) and (next_state, budget_after).
  void update(Batch batch, double gamma);
  void update(std::span<const TransitionRecord> records, double gamma);

  double value(const AugmentedKey& key, int g) const;
  void set_value(const AugmentedKey& key, int g, double v);

  double switching_cost() const { return switching_cost_; }
  bool budget_mode() const { return budget_mode_; }
  std::size_t table_size() const { return table_.size(); }

  /// Flat text, sorted: global state=<s> remaining=<x> g=<0|1> value=<q>
  void write(std::ostream& out) const;

 private:
  bool masked(const AugmentedKey& key) const { return budget_mode_ && key.remaining <= 0; }
  double best_value(const AugmentedKey& key) const;

  double switching_cost_;
  double learning_rate_;
  bool budget_mode_;
  std::unordered_map<AugmentedKey, std::array<double, 2>, AugmentedKeyHash> table_;
};

/// sum_t gamma^t (r_t - c * g_t) over consecutive records of one rollout.
double discounted_switch_objective(std::span<const TransitionRecord> rollout, double gamma, double c);

}  // namespace mansa
