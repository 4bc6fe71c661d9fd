#pragma once

#include <cmath>
#include <string_view>
#include <vector>

#include "slowfast/models/system_model.hpp"

namespace slowfast {

/// xdot = -y x + x^2, ydot = -eps: the transcritical bifurcation with its
/// parameter replaced by a slowly drifting variable.
///
/// Standard events: x_band (x - band, band = 1e-3 by default), y_zero (y),
/// diagonal (x - y).
[[nodiscard]] inline SystemModel make_transcritical_dynamical(double eps, double band = 1e-3) {
  require_positive_epsilon(eps);
  SystemModel m;
  m.name = "transcritical";
  m.params = {{"epsilon", eps}, {"band", band}};
  m.chart = Chart::XY;
  m.field = [eps](double, const Vec2& q) -> Vec2 {
    const double x = q[0], y = q[1];
    return {-y * x + x * x, -eps};
  };
  m.jacobian_fn = [](double, const Vec2& q) -> Mat<2> {
    const double x = q[0], y = q[1];
    return {{{-y + 2.0 * x, -x}, {0.0, 0.0}}};
  };

  auto dfast_dx = [](const Vec2& p) { return -p[1] + 2.0 * p[0]; };

  ManifoldBranch axis;
  axis.id = "x=0";
  axis.locus = Locus::VerticalLine;
  axis.value = 0.0;
  axis.transverse_eigenvalue = dfast_dx;
  axis.point_at = [](double y) { return Vec2{0.0, y}; };
  axis.repulsive_region = [](const Vec2& p) { return p[1] < 0.0; };

  ManifoldBranch lambda_line;
  lambda_line.id = "x=y";
  lambda_line.locus = Locus::LambdaLine;
  lambda_line.transverse_eigenvalue = dfast_dx;
  lambda_line.point_at = [](double y) { return Vec2{y, y}; };
  lambda_line.repulsive_region = [](const Vec2& p) { return p[1] > 0.0; };

  m.invariant_manifolds = {axis, lambda_line};
  m.standard_events = {
      {"x_band", [band](const State& s) { return s.q[0] - band; }, Direction::Any, false},
      {"y_zero", [](const State& s) { return s.q[1]; }, Direction::Any, false},
      {"diagonal", [](const State& s) { return s.q[0] - s.q[1]; }, Direction::Any, false},
  };
  return m;
}

enum class EquilibriumStability { Stable, Unstable, Degenerate };

[[nodiscard]] constexpr std::string_view to_string(EquilibriumStability s) noexcept {
  switch (s) {
    case EquilibriumStability::Stable: return "stable";
    case EquilibriumStability::Unstable: return "unstable";
    case EquilibriumStability::Degenerate: return "degenerate";
  }
  return "?";
}

struct Equilibrium {
  double location = 0.0;
  EquilibriumStability stability = EquilibriumStability::Degenerate;
};

struct EquilibriumReport {
  double lambda = 0.0;
  std::vector<Equilibrium> equilibria;
};

/// Equilibria of the static normal form xdot = -lambda x + x^2. The
/// linearization is -lambda at 0 and +lambda at lambda; lambda = 0 yields a
/// single equilibrium tagged degenerate (no stability is read off a zero
/// eigenvalue).
[[nodiscard]] inline EquilibriumReport static_equilibria(double lambda) {
  require(std::isfinite(lambda), ErrorKind::InvalidParameter, "lambda must be finite");
  EquilibriumReport r;
  r.lambda = lambda;
  if (lambda == 0.0) {
    r.equilibria.push_back({0.0, EquilibriumStability::Degenerate});
    return r;
  }
  auto classify = [](double eig) {
    return eig < 0.0 ? EquilibriumStability::Stable : EquilibriumStability::Unstable;
  };
  r.equilibria.push_back({0.0, classify(-lambda)});
  r.equilibria.push_back({lambda, classify(lambda)});
  return r;
}

}  // namespace slowfast
