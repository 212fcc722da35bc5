#pragma once

#include <cmath>
#include <numbers>
#include <utility>

namespace qconcept::detail {

inline constexpr double kDegPerRad = 180.0 / std::numbers::pi;

// acos in degrees; exact at the quarter-turn arguments 0 and +-1.
inline double acos_deg(double x) {
  if (x == 0.0) return 90.0;
  if (x == 1.0) return 0.0;
  if (x == -1.0) return 180.0;
  return std::acos(x) * kDegPerRad;
}

// (cos, sin) of an angle in degrees; exact at multiples of 90.
inline std::pair<double, double> cos_sin_deg(double deg) {
  const double quarter = deg / 90.0;
  if (quarter == std::round(quarter) && std::abs(quarter) < 1e15) {
    switch (((static_cast<long long>(quarter) % 4) + 4) % 4) {
      case 0:
        return {1.0, 0.0};
      case 1:
        return {0.0, 1.0};
      case 2:
        return {-1.0, 0.0};
      default:
        return {0.0, -1.0};
    }
  }
  const double rad = deg / kDegPerRad;
  return {std::cos(rad), std::sin(rad)};
}

}  // namespace qconcept::detail
