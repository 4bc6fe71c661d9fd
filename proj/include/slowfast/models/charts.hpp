#pragma once

#include <cmath>
#include <limits>

#include "slowfast/error.hpp"
#include "slowfast/ode/types.hpp"

namespace slowfast {

// log(1 + e^z) without overflow.
[[nodiscard]] inline double softplus(double z) noexcept {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

// ln cosh u = |u| - ln 2 + ln(1 + e^{-2|u|}), finite for every finite u.
[[nodiscard]] inline double log_cosh(double u) noexcept {
  const double a = std::abs(u);
  return a - std::log(2.0) + std::log1p(std::exp(-2.0 * a));
}

// sech^2 u = 4 e^{-2|u|} / (1 + e^{-2|u|})^2; underflows gracefully to 0.
[[nodiscard]] inline double sech2(double u) noexcept {
  const double e = std::exp(-2.0 * std::abs(u));
  return 4.0 * e / ((1.0 + e) * (1.0 + e));
}

/// log of the distance from x = tanh u to the line x = +1:
/// log(1 - tanh u) = log 2 - softplus(2u). Representable far below the
/// resolution of x itself.
[[nodiscard]] inline double log_dist_to_plus_one(double u) noexcept {
  return std::log(2.0) - softplus(2.0 * u);
}

/// log(1 + tanh u) = log 2 - softplus(-2u), the distance to x = -1.
[[nodiscard]] inline double log_dist_to_minus_one(double u) noexcept {
  return std::log(2.0) - softplus(-2.0 * u);
}

/// ln(1 - x^2) for |x| < 1 via log1p on both factors.
[[nodiscard]] inline double log_one_minus_x2(double x) noexcept {
  return std::log1p(-x) + std::log1p(x);
}

/// 1 - |tanh u| = 2 e^{-2|u|} / (1 + e^{-2|u|}), no cancellation.
[[nodiscard]] inline double strip_complement(double u) noexcept {
  const double e = std::exp(-2.0 * std::abs(u));
  return 2.0 * e / (1.0 + e);
}

/// Inverse of strip_complement: |u| from d = 1 - |x| in (0, 1], returned with
/// the sign of `sign`. Keeps the full round trip accurate where x itself has
/// already rounded to +-1.
[[nodiscard]] inline double u_from_complement(double d, double sign) {
  require(d > 0.0 && d <= 1.0, ErrorKind::OutOfChart, "strip complement must lie in (0, 1]");
  // artanh(1 - d) = (ln(2 - d) - ln d) / 2
  const double a = 0.5 * (std::log(2.0) + std::log1p(-0.5 * d) - std::log(d));
  return std::copysign(a, sign);
}

/// Maps a point between charts. y is shared by XY and UY; XG carries the gap
/// g = y - x instead of y. UY <-> XG goes through XY.
[[nodiscard]] inline Vec2 chart_transform(const Vec2& p, Chart from, Chart to) {
  if (from == to) return p;
  Vec2 xy{};
  switch (from) {
    case Chart::XY: xy = p; break;
    case Chart::UY: xy = {std::tanh(p[0]), p[1]}; break;
    case Chart::XG: xy = {p[0], p[0] + p[1]}; break;
  }
  switch (to) {
    case Chart::XY: return xy;
    case Chart::UY:
      if (!(std::abs(xy[0]) < 1.0))
        throw Error(ErrorKind::OutOfChart, "x = " + std::to_string(xy[0]) +
                                               " is outside the strip |x| < 1 of the UY chart");
      return {std::atanh(xy[0]), xy[1]};
    case Chart::XG: return {xy[0], xy[1] - xy[0]};
  }
  return xy;
}

}  // namespace slowfast
