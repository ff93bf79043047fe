#pragma once

// Modified Bessel functions of the second kind, orders 0, 1, 2.

#include <cmath>
#include <string>

#include "prhf/error.hpp"

namespace prhf {

/// Arguments above this return exactly 0 instead of subnormal values.
inline constexpr double kBesselUnderflow = 700.0;

/// K_order(t) for order 0, 1 or 2 and t > 0. Order 2 uses
/// K_2 = K_0 + (2/t) K_1.
inline double bessel_k(int order, double t) {
  if (!(t > 0.0)) throw DomainError("bessel_k needs t > 0, got " + std::to_string(t));
  if (order < 0 || order > 2) throw DomainError("bessel_k supports orders 0, 1, 2");
  if (t > kBesselUnderflow) return 0.0;
  if (order == 2) return std::cyl_bessel_k(0.0, t) + (2.0 / t) * std::cyl_bessel_k(1.0, t);
  return std::cyl_bessel_k(static_cast<double>(order), t);
}

}  // namespace prhf
