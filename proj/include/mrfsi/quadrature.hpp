#pragma once

#include <array>
#include <cmath>

namespace mrfsi {

/// Two-point Gauss rule on [a, b]: nodes and weights.
struct Gauss2 {
  std::array<double, 2> points;
  std::array<double, 2> weights;
};

inline Gauss2 gauss2(double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double offset = half / std::sqrt(3.0);
  return {{mid - offset, mid + offset}, {half, half}};
}

/// Gauss points on the reference interval [0, 1].
inline constexpr std::array<double, 2> gauss2_unit_points() {
  // 0.5 -+ 1/(2 sqrt 3)
  constexpr double offset = 0.28867513459481288225;
  return {0.5 - offset, 0.5 + offset};
}

}  // namespace mrfsi
