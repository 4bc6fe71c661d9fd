#pragma once

#include <cmath>

#include "slowfast/models/system_model.hpp"

namespace slowfast {

/// Fast nullcline of the canard system, f(x) = x^3/3 + x^2, and its slope.
[[nodiscard]] constexpr double vdp_f(double x) noexcept { return x * x * x / 3.0 + x * x; }
[[nodiscard]] constexpr double vdp_fprime(double x) noexcept { return x * x + 2.0 * x; }

/// Van der Pol system in canard form
///   eps xdot = y - f(x),   ydot = c - x.
/// The slow equation is oriented so the equilibrium (c, f(c)) is a focus or
/// node (Jacobian determinant 1/eps > 0) and loses stability through a Hopf
/// point at the fold x = 0; with ydot = x - c it would be a saddle for every c
/// and no cycles exist.
///
/// Standard event: x_extremum, g = y - f(x) (zero exactly where xdot = 0).
[[nodiscard]] inline SystemModel make_vdp_canard(double eps, double c) {
  require_positive_epsilon(eps);
  require(std::isfinite(c), ErrorKind::InvalidParameter, "c must be finite");
  SystemModel m;
  m.name = "vdp";
  m.params = {{"epsilon", eps}, {"c", c}};
  m.chart = Chart::XY;
  m.field = [eps, c](double, const Vec2& q) -> Vec2 {
    return {(q[1] - vdp_f(q[0])) / eps, c - q[0]};
  };
  m.jacobian_fn = [eps](double, const Vec2& q) -> Mat<2> {
    return {{{-vdp_fprime(q[0]) / eps, 1.0 / eps}, {-1.0, 0.0}}};
  };

  ManifoldBranch critical;
  critical.id = "y=f(x)";
  critical.locus = Locus::Cubic;
  critical.transverse_eigenvalue = [eps](const Vec2& p) { return -vdp_fprime(p[0]) / eps; };
  critical.point_at = [](double x) { return Vec2{x, vdp_f(x)}; };
  critical.repulsive_region = [](const Vec2& p) { return p[0] > -2.0 && p[0] < 0.0; };
  critical.folds = {-2.0, 0.0};
  m.invariant_manifolds = {critical};

  m.standard_events = {
      {"x_extremum", [](const State& s) { return s.q[1] - vdp_f(s.q[0]); }, Direction::Any,
       false},
  };
  return m;
}

}  // namespace slowfast
