#pragma once

#include <cmath>
#include <numbers>

namespace rankone {

/// Standard normal CDF via erfc; Phi(0) == 0.5 exactly.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// 1 - N([-y, y]) for y >= 0.
inline double normal_two_sided_tail(double y) { return std::erfc(y / std::numbers::sqrt2); }

}  // namespace rankone
