#include "mansa/core.hpp"

namespace mansa {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform01(Rng& rng) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

int uniform_index(Rng& rng, int n) {
  std::uniform_int_distribution<int> dist(0, n - 1);
  return dist(rng);
}

int argmax(std::span<const double> values) {
  int best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = static_cast<int>(i);
  }
  return best;
}

std::size_t ObservationHash::operator()(const Observation& obs) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ obs.size();
  for (std::int32_t v : obs) {
    h ^= static_cast<std::uint32_t>(v);
    h *= 0x100000001b3ULL;
    h ^= h >> 29;
  }
  return static_cast<std::size_t>(h);
}

}  // namespace mansa
