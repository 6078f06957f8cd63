#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mansa {

/// Dense integer encoding of a full global environment state.
using StateKey = std::uint64_t;

/// Fixed-length local observation of one agent.
using Observation = std::vector<std::int32_t>;

/// One action index per agent.
using JointAction = std::vector<int>;

using Rng = std::mt19937_64;

/// A caller broke an operation's precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed or inconsistent configuration, detected at build/load time.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A run-time safety property failed (e.g. the activation budget was exceeded).
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

double uniform01(Rng& rng);
int uniform_index(Rng& rng, int n);

/// Lowest index among the maxima.
int argmax(std::span<const double> values);

struct ObservationHash {
  std::size_t operator()(const Observation& obs) const noexcept;
};

}  // namespace mansa
