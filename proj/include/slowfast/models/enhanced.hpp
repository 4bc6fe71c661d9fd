#pragma once

#include <cmath>

#include "slowfast/models/charts.hpp"
#include "slowfast/models/system_model.hpp"

namespace slowfast {

/// The enhanced-delay system
///   xdot = (1 - x^2)(x - y),  ydot = eps x
/// in one of three charts:
///   XY  the whole plane,
///   UY  x = tanh u on the strip |x| < 1:  udot = tanh u - y, ydot = eps tanh u,
///   XG  g = y - x outside the strip:      xdot = (x^2 - 1) g, gdot = eps x - (x^2 - 1) g.
///
/// For |u| > 20, tanh u already rounds to +-1 in double precision; the UY
/// field uses that value as is (modelling error < 1e-17).
///
/// Standard events (ids):
///   x_zero      x = 0 (u = 0 in UY)
///   diagonal    y - x = 0 (y - tanh u in UY)
///   band_plus   log(1 - x) - log(delta): negative inside the band at x = +1
///   band_minus  log(1 + x) - log(delta): negative inside the band at x = -1
///   region_plus y - 1, region_minus y + 1: boundaries of the repulsive parts
/// XG models only carry `diagonal` (the gap itself).
[[nodiscard]] inline SystemModel make_enhanced_delay(double eps, Chart chart,
                                                     double delta = 0.05) {
  require_positive_epsilon(eps);
  require(std::isfinite(delta) && delta > 0.0 && delta < 1.0, ErrorKind::InvalidParameter,
          "delta must lie in (0, 1)");

  SystemModel m;
  m.name = "enhanced";
  m.params = {{"epsilon", eps}, {"delta", delta}};
  m.chart = chart;

  switch (chart) {
    case Chart::XY:
      m.field = [eps](double, const Vec2& q) -> Vec2 {
        const double x = q[0], y = q[1];
        return {(1.0 - x * x) * (x - y), eps * x};
      };
      m.jacobian_fn = [eps](double, const Vec2& q) -> Mat<2> {
        const double x = q[0], y = q[1];
        return {{{-2.0 * x * (x - y) + (1.0 - x * x), -(1.0 - x * x)}, {eps, 0.0}}};
      };
      break;
    case Chart::UY:
      m.field = [eps](double, const Vec2& q) -> Vec2 {
        const double x = std::tanh(q[0]);
        return {x - q[1], eps * x};
      };
      m.jacobian_fn = [eps](double, const Vec2& q) -> Mat<2> {
        const double s = sech2(q[0]);
        return {{{s, -1.0}, {eps * s, 0.0}}};
      };
      break;
    case Chart::XG:
      m.field = [eps](double, const Vec2& q) -> Vec2 {
        const double x = q[0], g = q[1];
        const double lam = x * x - 1.0;
        return {lam * g, eps * x - lam * g};
      };
      m.jacobian_fn = [eps](double, const Vec2& q) -> Mat<2> {
        const double x = q[0], g = q[1];
        const double lam = x * x - 1.0;
        return {{{2.0 * x * g, lam}, {eps - 2.0 * x * g, -lam}}};
      };
      break;
  }

  // d/dx [(1 - x^2)(x - y)] = (1 - x^2) - 2x(x - y)
  auto dfast_dx = [](const Vec2& p) {
    const double x = p[0], y = p[1];
    return (1.0 - x * x) - 2.0 * x * (x - y);
  };

  ManifoldBranch plus;
  plus.id = "x=+1";
  plus.locus = Locus::VerticalLine;
  plus.value = 1.0;
  plus.transverse_eigenvalue = dfast_dx;
  plus.point_at = [](double y) { return Vec2{1.0, y}; };
  plus.repulsive_region = [](const Vec2& p) { return p[1] > 1.0; };

  ManifoldBranch minus;
  minus.id = "x=-1";
  minus.locus = Locus::VerticalLine;
  minus.value = -1.0;
  minus.transverse_eigenvalue = dfast_dx;
  minus.point_at = [](double y) { return Vec2{-1.0, y}; };
  minus.repulsive_region = [](const Vec2& p) { return p[1] < -1.0; };

  ManifoldBranch diag;
  diag.id = "y=x";
  diag.locus = Locus::Diagonal;
  diag.transverse_eigenvalue = dfast_dx;
  diag.point_at = [](double y) { return Vec2{y, y}; };
  diag.repulsive_region = [](const Vec2& p) { return std::abs(p[0]) < 1.0; };

  m.invariant_manifolds = {plus, minus, diag};

  const double log_delta = std::log(delta);
  switch (chart) {
    case Chart::XY:
      m.standard_events = {
          {"x_zero", [](const State& s) { return s.q[0]; }, Direction::Any, false},
          {"diagonal", [](const State& s) { return s.q[1] - s.q[0]; }, Direction::Any, false},
          {"band_plus",
           [log_delta](const State& s) { return std::log(std::abs(1.0 - s.q[0])) - log_delta; },
           Direction::Any, false},
          {"band_minus",
           [log_delta](const State& s) { return std::log(std::abs(1.0 + s.q[0])) - log_delta; },
           Direction::Any, false},
          {"region_plus", [](const State& s) { return s.q[1] - 1.0; }, Direction::Any, false},
          {"region_minus", [](const State& s) { return s.q[1] + 1.0; }, Direction::Any, false},
      };
      break;
    case Chart::UY:
      m.standard_events = {
          {"x_zero", [](const State& s) { return s.q[0]; }, Direction::Any, false},
          {"diagonal", [](const State& s) { return s.q[1] - std::tanh(s.q[0]); },
           Direction::Any, false},
          {"band_plus",
           [log_delta](const State& s) { return log_dist_to_plus_one(s.q[0]) - log_delta; },
           Direction::Any, false},
          {"band_minus",
           [log_delta](const State& s) { return log_dist_to_minus_one(s.q[0]) - log_delta; },
           Direction::Any, false},
          {"region_plus", [](const State& s) { return s.q[1] - 1.0; }, Direction::Any, false},
          {"region_minus", [](const State& s) { return s.q[1] + 1.0; }, Direction::Any, false},
      };
      break;
    case Chart::XG:
      m.standard_events = {
          {"diagonal", [](const State& s) { return s.q[1]; }, Direction::Any, false},
      };
      break;
  }
  return m;
}

}  // namespace slowfast
