#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mansa {

/// Shortest text that round-trips the double exactly.
std::string format_double(double v);

std::string join_ints(const std::vector<std::int32_t>& values);

}  // namespace mansa
