#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mansa/core.hpp"

namespace mansa {

/// Replay entry. Budget fields are -1 outside budget mode. terminal marks a
/// genuine end of the task; an episode cut by the step limit is stored with
/// terminal false so the learners keep bootstrapping from next_state.
struct TransitionRecord {
  std::uint64_t step = 0;
  StateKey state = 0;
  std::vector<Observation> observations;
  JointAction action;
  int switch_decision = 0;
  double reward = 0.0;
  StateKey next_state = 0;
  std::vector<Observation> next_observations;
  bool terminal = false;
  std::int64_t budget_before = -1;
  std::int64_t budget_after = -1;
};

using Batch = std::span<const TransitionRecord* const>;

/// Pointer view over contiguous records, for callers that own a plain vector.
std::vector<const TransitionRecord*> batch_of(std::span<const TransitionRecord> records);

}  // namespace mansa
