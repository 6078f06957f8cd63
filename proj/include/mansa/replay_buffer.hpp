#pragma once

#include <cstddef>
#include <vector>

#include "mansa/core.hpp"
#include "mansa/transition.hpp"

namespace mansa {

/// FIFO ring of transitions; sampling is uniform with replacement.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(TransitionRecord record);
  std::vector<const TransitionRecord*> sample(std::size_t batch_size, Rng& rng) const;

  std::size_t size() const { return records_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return records_.empty(); }

  /// Oldest first.
  std::vector<const TransitionRecord*> in_order() const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // next slot to overwrite once full
  std::vector<TransitionRecord> records_;
};

}  // namespace mansa
