#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "slowfast/analysis/bernoulli.hpp"
#include "slowfast/error.hpp"
#include "slowfast/models/transcritical.hpp"
#include "slowfast/ode/integrate.hpp"

namespace slowfast {

struct OracleRow {
  double t = 0.0;
  double x_numeric = 0.0;
  double x_closed_form = 0.0;
  double rel_err = 0.0;
};

struct TranscriticalDelayReport {
  double x0 = 0.0, y0 = 0.0, eps = 0.0;
  double t_end = 0.0;  // 2 y0 / eps
  std::vector<OracleRow> rows;
  double max_rel_err = 0.0;
  double max_x = 0.0;  // over samples with 0 < t < t_end
  double t_max_x = 0.0;
  // First sample time in (0, t_end) with x >= x0; NaN when there is none.
  double t_first_exceed = std::numeric_limits<double>::quiet_NaN();
  bool delay_holds = false;  // max_x < x0
  double x_mid = 0.0;        // closed form at t = y0 / eps
  double log_x_mid = 0.0;
};

/// Tolerances used for the transcritical run. x decays to exp(-y0^2/(2 eps))
/// times x0, so the absolute tolerance is effectively switched off.
[[nodiscard]] inline ToleranceConfig transcritical_tolerances() {
  ToleranceConfig tol;
  tol.rel_tol = 1e-11;
  tol.abs_tol = 1e-300;
  tol.max_step = 0.5;
  return tol;
}

/// Integrates xdot = -y x + x^2, ydot = -eps from (x0, y0) over [0, 2 y0/eps],
/// compares every accepted sample with the closed form and records how far x
/// rises over the window. Throws OracleMismatch when the worst relative
/// difference exceeds `tol`.
[[nodiscard]] inline TranscriticalDelayReport verify_transcritical_delay(
    double x0, double y0, double eps, double tol,
    const ToleranceConfig& ode_tol = transcritical_tolerances()) {
  require_positive_epsilon(eps);
  require(std::isfinite(x0) && std::isfinite(y0) && x0 > 0.0 && x0 < y0 / 2.0,
          ErrorKind::InvalidParameter, "x0 must satisfy 0 < x0 < y0/2");
  require(std::isfinite(tol) && tol > 0.0, ErrorKind::InvalidParameter, "tol must be > 0");

  TranscriticalDelayReport rep;
  rep.x0 = x0;
  rep.y0 = y0;
  rep.eps = eps;
  rep.t_end = 2.0 * y0 / eps;

  const SystemModel model = make_transcritical_dynamical(eps);
  const auto traj = integrate<2>(model, State{0.0, {x0, y0}}, rep.t_end, ode_tol);
  if (traj.termination != Termination::TimeLimit)
    throw Error(ErrorKind::NotFoundWithinBudget,
                "transcritical run stopped early: " + std::string(to_string(traj.termination)));

  rep.rows.reserve(traj.samples.size());
  for (const auto& s : traj.samples) {
    const BernoulliEval cf = bernoulli_solution(x0, y0, eps, s.t);
    OracleRow r{s.t, s.q[0], cf.x, 0.0};
    r.rel_err = cf.x == 0.0 ? std::abs(s.q[0]) : std::abs(s.q[0] - cf.x) / std::abs(cf.x);
    rep.max_rel_err = std::max(rep.max_rel_err, r.rel_err);
    if (s.t > 0.0 && s.t < rep.t_end) {
      if (s.q[0] > rep.max_x || rep.t_max_x == 0.0) {
        rep.max_x = s.q[0];
        rep.t_max_x = s.t;
      }
      if (s.q[0] >= x0 && std::isnan(rep.t_first_exceed)) rep.t_first_exceed = s.t;
    }
    rep.rows.push_back(r);
  }
  rep.delay_holds = rep.max_x < x0;
  const BernoulliEval mid = bernoulli_solution(x0, y0, eps, y0 / eps);
  rep.x_mid = mid.x;
  rep.log_x_mid = mid.log_x;

  if (rep.max_rel_err > tol) {
    std::ostringstream msg;
    msg << "numeric and closed-form solutions differ by " << rep.max_rel_err
        << " (relative) > " << tol << " for x0=" << x0 << " y0=" << y0 << " eps=" << eps;
    throw Error(ErrorKind::OracleMismatch, msg.str());
  }
  return rep;
}

}  // namespace slowfast
