#pragma once

#include <span>

namespace mlabc {

/// Cubic smoothing step: 1 for x <= -1, 0 for x >= 1 and
/// 5/8 x^3 - 9/8 x + 1/2 in between. Continuous, with xi(x) + xi(-x) = 1.
/// It overshoots [0, 1] slightly (max 1.0809 at x = -sqrt(3/5)).
constexpr double smoothing_xi(double x) noexcept {
  if (x <= -1.0) return 1.0;
  if (x >= 1.0) return 0.0;
  return (0.625 * x * x - 1.125) * x + 0.5;
}

/// Lipschitz surrogate for the indicator of {theta <= s} (componentwise):
/// prod_j xi((theta_j - s_j) / delta_j). Exactly 1 when theta <= s - delta in
/// every component and exactly 0 when some theta_j >= s_j + delta_j.
double smoothed_indicator(std::span<const double> theta, std::span<const double> node,
                          std::span<const double> spacing);

}  // namespace mlabc
