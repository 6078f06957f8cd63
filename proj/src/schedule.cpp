#include "mansa/schedule.hpp"

#include "mansa/core.hpp"
#include "mansa/transition.hpp"

namespace mansa {

void validate_epsilon(const LinearSchedule& s) {
  if (!(s.start >= 0.0 && s.start <= 1.0 && s.end >= 0.0 && s.end <= 1.0)) {
    throw ConfigError("epsilon schedule endpoints must lie in [0,1]");
  }
}

void validate_temperature(const LinearSchedule& s) {
  if (!(s.start > 0.0 && s.end > 0.0)) throw ConfigError("temperature must stay positive");
}

std::vector<const TransitionRecord*> batch_of(std::span<const TransitionRecord> records) {
  std::vector<const TransitionRecord*> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(&r);
  return out;
}

}  // namespace mansa
