#pragma once

#include <cstdint>

namespace mansa {

/// Linear interpolation from `start` to `end` over `decay_steps`, then flat.
struct LinearSchedule {
  double start = 1.0;
  double end = 0.05;
  std::uint64_t decay_steps = 1;

  double at(std::uint64_t step) const {
    if (decay_steps == 0 || step >= decay_steps) return end;
    double frac = static_cast<double>(step) / static_cast<double>(decay_steps);
    return start + (end - start) * frac;
  }
};

/// Throws ConfigError unless both endpoints lie in [0,1].
void validate_epsilon(const LinearSchedule& s);
/// Throws ConfigError unless both endpoints are > 0.
void validate_temperature(const LinearSchedule& s);

}  // namespace mansa
