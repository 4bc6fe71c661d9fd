#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "slowfast/error.hpp"
#include "slowfast/models/enhanced.hpp"
#include "slowfast/ode/integrate.hpp"

namespace slowfast {

struct GapSample {
  double t = 0.0;
  double gap = 0.0;  // sign(x0) (y - x)
};

struct AsymptoteReport {
  double x0 = 0.0, y0 = 0.0, eps = 0.0, horizon = 0.0;
  double alpha0 = 0.0;  // (x0 - 1/x0) / eps
  double bound = 0.0;   // 1 / (2 |alpha0|)
  double sup_gap = 0.0;
  double t_sup = 0.0;
  double min_gap = 0.0;
  double gap_at_horizon = 0.0;
  double x_at_horizon = 0.0;
  std::vector<GapSample> gaps;      // every accepted step
  std::vector<GapSample> gap_tail;  // second half of the run
  bool above_line = false;          // min_gap >= -slack
  bool bound_satisfied = false;     // sup_gap <= bound (1 + bound_slack)
  std::uint64_t steps = 0;
};

[[nodiscard]] inline ToleranceConfig asymptote_tolerances() {
  ToleranceConfig tol;
  tol.rel_tol = 1e-9;
  tol.abs_tol = 1e-14;
  tol.max_steps = 10'000'000;
  return tol;
}

/// Integrates the enhanced system from (x0, x0), |x0| > 1, up to `horizon`.
/// Outside the strip the fast rate grows like x^2 while x itself grows like
/// exp(eps t), so the run uses the (x, g = y - x) chart and a linearly
/// implicit Rosenbrock method. Gaps are normalized by sign(x0), so the
/// mirrored run from -x0 yields the same sequence.
[[nodiscard]] inline AsymptoteReport asymptote_check(double x0, double eps, double horizon = 200.0,
                                                     double slack = 1e-9,
                                                     double bound_slack = 0.1,
                                                     const ToleranceConfig& tol =
                                                         asymptote_tolerances()) {
  require_positive_epsilon(eps);
  require(std::isfinite(x0) && std::abs(x0) > 1.0, ErrorKind::InvalidParameter,
          "x0 must satisfy |x0| > 1");
  require(std::isfinite(horizon) && horizon > 0.0, ErrorKind::InvalidParameter,
          "horizon must be > 0");

  AsymptoteReport rep;
  rep.x0 = x0;
  rep.y0 = x0;
  rep.eps = eps;
  rep.horizon = horizon;
  rep.alpha0 = (x0 - 1.0 / x0) / eps;
  rep.bound = 1.0 / (2.0 * std::abs(rep.alpha0));

  const SystemModel model = make_enhanced_delay(eps, Chart::XG);
  const auto traj = integrate<2>(model, State{0.0, {x0, 0.0}}, horizon, tol, {},
                                 IntegrateOptions{Chart::XG}, Rosenbrock23{});
  if (traj.termination != Termination::TimeLimit)
    throw Error(ErrorKind::NotFoundWithinBudget,
                "asymptote run stopped early: " + std::string(to_string(traj.termination)));

  const double sgn = x0 > 0.0 ? 1.0 : -1.0;
  rep.gaps.reserve(traj.samples.size());
  rep.min_gap = 0.0;
  for (const auto& s : traj.samples) {
    const GapSample g{s.t, sgn * s.q[1]};
    rep.gaps.push_back(g);
    if (g.gap > rep.sup_gap) {
      rep.sup_gap = g.gap;
      rep.t_sup = g.t;
    }
    rep.min_gap = std::min(rep.min_gap, g.gap);
    if (s.t >= 0.5 * horizon) rep.gap_tail.push_back(g);
  }
  rep.gap_at_horizon = rep.gaps.back().gap;
  rep.x_at_horizon = traj.back().q[0];
  rep.above_line = rep.min_gap >= -slack;
  rep.bound_satisfied = rep.sup_gap <= rep.bound * (1.0 + bound_slack);
  rep.steps = traj.accepted_steps;
  return rep;
}

}  // namespace slowfast
