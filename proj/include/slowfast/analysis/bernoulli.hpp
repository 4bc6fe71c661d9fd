#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "slowfast/error.hpp"

namespace slowfast {

/// Closed-form solution of xdot = -(y0 - eps t) x + x^2 (the transcritical
/// system with y(t) = y0 - eps t), evaluated at one time:
///   Y(t) = y0 t - eps t^2 / 2
///   I(t) = int_0^t exp(-Y(s)) ds
///   x(t) = x0 exp(-Y) / (1 - x0 I)
struct BernoulliEval {
  double x0 = 0.0;
  double y0 = 0.0;
  double eps = 0.0;
  double t = 0.0;
  double Y = 0.0;
  double I = 0.0;  // +inf when it exceeds double range (the solution has blown up by then)
  double x = 0.0;
  double log_x = -std::numeric_limits<double>::infinity();
};

[[nodiscard]] inline double bernoulli_Y(double y0, double eps, double t) noexcept {
  return y0 * t - 0.5 * eps * t * t;
}

/// I(t) = exp(shift) * scaled, with shift = max over [0, t] of -Y. The
/// integrand exp(-Y(s) - shift) never exceeds 1.
struct ScaledIntegral {
  double shift = 0.0;
  double scaled = 0.0;

  [[nodiscard]] double value() const noexcept { return std::exp(shift) * scaled; }
  [[nodiscard]] double log_value() const noexcept { return shift + std::log(scaled); }
};

/// Composite Gauss-Kronrod (31 points per panel) on the shifted integrand.
/// -Y(s) = eps s^2/2 - y0 s is an upward parabola, so its maximum over [0, t]
/// sits at an end point. Panels are short enough that Y changes by at most 1
/// across each, where the 31-point rule is exact to rounding. (Boost's
/// adaptive driver is not used: its error floor does not shrink with the
/// interval, so short intervals recurse to the depth limit.)
[[nodiscard]] inline ScaledIntegral bernoulli_integral(double y0, double eps, double t) {
  require(eps > 0.0 && std::isfinite(eps), ErrorKind::InvalidParameter, "epsilon must be > 0");
  require(t >= 0.0 && std::isfinite(t), ErrorKind::InvalidParameter, "t must be >= 0");
  ScaledIntegral r;
  r.shift = std::max(0.0, -bernoulli_Y(y0, eps, t));
  if (t == 0.0) return r;
  const double shift = r.shift;
  auto integrand = [=](double s) { return std::exp(-bernoulli_Y(y0, eps, s) - shift); };
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

  // |Y'(s)| = |y0 - eps s| is largest at an end point.
  const double slope = std::max(std::abs(y0), std::abs(y0 - eps * t));
  const double panels = std::clamp(std::ceil(slope * t), 1.0, 1e6);
  const auto n = static_cast<std::size_t>(panels);
  const double h = t / panels;
  double sum = 0.0, comp = 0.0;  // Kahan summation over panels
  for (std::size_t i = 0; i < n; ++i) {
    const double a = h * static_cast<double>(i);
    const double b = i + 1 == n ? t : h * static_cast<double>(i + 1);
    const double piece = GK::integrate(integrand, a, b, 0, 0.0) - comp;
    const double next = sum + piece;
    comp = (next - sum) - piece;
    sum = next;
  }
  r.scaled = sum;
  return r;
}

namespace detail {

// log(1 - x0 I) when positive; NaN when the denominator has reached zero.
inline double log_denominator(double x0, const ScaledIntegral& I) {
  if (x0 == 0.0) return 0.0;
  if (x0 < 0.0) {
    // log(1 + e^a) with a = log(-x0 I), which may exceed double range as e^a
    const double a = std::log(-x0) + I.log_value();
    return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a));
  }
  const double log_x0I = std::log(x0) + I.log_value();
  if (log_x0I >= 0.0) return std::numeric_limits<double>::quiet_NaN();
  // log(1 - e^a) for a < 0
  return log_x0I > -std::log(2.0) ? std::log(-std::expm1(log_x0I))
                                  : std::log1p(-std::exp(log_x0I));
}

}  // namespace detail

/// Evaluates the closed form at time t. Throws BlowUpError, carrying a
/// bracket for the blow-up time, when 1 - x0 I reaches zero before t.
[[nodiscard]] inline BernoulliEval bernoulli_solution(double x0, double y0, double eps,
                                                      double t) {
  require(std::isfinite(x0) && std::isfinite(y0), ErrorKind::InvalidParameter,
          "x0 and y0 must be finite");
  BernoulliEval e;
  e.x0 = x0;
  e.y0 = y0;
  e.eps = eps;
  e.t = t;
  e.Y = bernoulli_Y(y0, eps, t);
  const ScaledIntegral I = bernoulli_integral(y0, eps, t);
  e.I = I.value();

  const double log_den = detail::log_denominator(x0, I);
  if (std::isnan(log_den)) {
    // I is increasing in t, so bisect on the sign of the denominator.
    double lo = 0.0, hi = t;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (std::isnan(detail::log_denominator(x0, bernoulli_integral(y0, eps, mid))))
        hi = mid;
      else
        lo = mid;
    }
    throw BlowUpError(lo, hi);
  }

  if (x0 > 0.0) {
    e.log_x = std::log(x0) - e.Y - log_den;
    e.x = std::exp(e.log_x);
  } else {
    e.x = x0 * std::exp(-e.Y - log_den);
  }
  return e;
}

}  // namespace slowfast
