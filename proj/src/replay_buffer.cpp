#include "mansa/replay_buffer.hpp"

namespace mansa {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("replay buffer capacity must be positive");
}

void ReplayBuffer::push(TransitionRecord record) {
  if (records_.size() < capacity_) {
    records_.push_back(std::move(record));
    return;
  }
  records_[head_] = std::move(record);
  head_ = (head_ + 1) % capacity_;
}

std::vector<const TransitionRecord*> ReplayBuffer::sample(std::size_t batch_size, Rng& rng) const {
  if (records_.empty()) throw ContractViolation("cannot sample an empty replay buffer");
  std::vector<const TransitionRecord*> batch;
  batch.reserve(batch_size);
  const int n = static_cast<int>(records_.size());
  for (std::size_t i = 0; i < batch_size; ++i) batch.push_back(&records_[uniform_index(rng, n)]);
  return batch;
}

std::vector<const TransitionRecord*> ReplayBuffer::in_order() const {
  std::vector<const TransitionRecord*> out;
  out.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    out.push_back(&records_[(head_ + i) % records_.size()]);
  }
  return out;
}

}  // namespace mansa
