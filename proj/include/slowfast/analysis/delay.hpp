#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "slowfast/analysis/crossings.hpp"
#include "slowfast/analysis/strip.hpp"
#include "slowfast/error.hpp"
#include "slowfast/models/charts.hpp"
#include "slowfast/ode/types.hpp"

namespace slowfast {

struct DelayPass {
  double enter_t = 0.0;
  double exit_t = 0.0;
  double duration = 0.0;
  double y_enter = 0.0;
  double y_exit = 0.0;
  // Still inside when the trajectory ended; exit_t is then the last time.
  bool open = false;
};

struct DelayReport {
  double delta = 0.0;
  std::string branch;
  std::vector<DelayPass> passes;
  double total_time = 0.0;
};

namespace detail {

// Signed margin of a point with respect to the residence set of a branch:
// positive inside (within delta of x = +-1 and in the repulsive part),
// the smaller of the band margin and the region margin.
struct ResidenceMargin {
  int side = +1;  // +1 for x = +1, -1 for x = -1
  Chart chart = Chart::UY;
  double log_delta = 0.0;

  [[nodiscard]] double log_distance(double a) const {
    if (chart == Chart::UY) return side > 0 ? log_dist_to_plus_one(a) : log_dist_to_minus_one(a);
    const double d = std::abs(1.0 - side * a);
    return d == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(d);
  }

  [[nodiscard]] double operator()(double a, double y) const {
    const double band = log_delta - log_distance(a);
    const double region = side * y - 1.0;
    return std::min(band, region);
  }
};

struct TimedPoint {
  double t;
  double a;
  double y;
};

template <std::size_t N>
std::vector<TimedPoint> merged_timeline(const TrajectoryN<N>& traj) {
  std::vector<TimedPoint> pts;
  pts.reserve(traj.samples.size() + traj.events.size());
  for (const auto& s : traj.samples) pts.push_back({s.t, s.q[0], s.q[1]});
  for (const auto& e : traj.events) pts.push_back({e.state.t, e.state.q[0], e.state.q[1]});
  std::stable_sort(pts.begin(), pts.end(),
                   [](const TimedPoint& l, const TimedPoint& r) { return l.t < r.t; });
  return pts;
}

}  // namespace detail

/// Residence intervals near the repulsive part of x = +1 (y > 1) or x = -1
/// (y < -1) within distance delta. Works on UY trajectories (log-distance
/// evaluated from u, representable for any delta) and XY trajectories.
/// Boundaries are placed by linear interpolation of the margin between
/// consecutive samples and event states; since refined band and region
/// events sit on the trajectory, boundaries fall on those event times.
template <std::size_t N>
[[nodiscard]] DelayReport delay_report(const TrajectoryN<N>& traj, const std::string& branch,
                                       double delta) {
  require(std::isfinite(delta) && delta > 0.0, ErrorKind::InvalidParameter,
          "delta must be > 0");
  require(branch == "x=+1" || branch == "x=-1", ErrorKind::InvalidParameter,
          "delay_report branch must be x=+1 or x=-1 (got " + branch + ")");
  require(traj.chart == Chart::UY || traj.chart == Chart::XY, ErrorKind::InvalidParameter,
          "delay_report needs a UY or XY trajectory");

  DelayReport rep;
  rep.delta = delta;
  rep.branch = branch;
  const detail::ResidenceMargin margin{branch == "x=+1" ? +1 : -1, traj.chart, std::log(delta)};
  const auto pts = detail::merged_timeline(traj);
  if (pts.empty()) return rep;

  auto crossing = [&](const detail::TimedPoint& p, double mp, const detail::TimedPoint& q,
                      double mq) {
    const double w = mp / (mp - mq);
    return std::pair{p.t + w * (q.t - p.t), p.y + w * (q.y - p.y)};
  };

  std::optional<DelayPass> cur;
  double m_prev = margin(pts.front().a, pts.front().y);
  if (m_prev > 0.0) cur = DelayPass{pts.front().t, 0.0, 0.0, pts.front().y, 0.0, false};
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const auto& p = pts[i - 1];
    const auto& q = pts[i];
    const double m = margin(q.a, q.y);
    const bool in_prev = m_prev > 0.0, in_now = m > 0.0;
    if (!in_prev && in_now) {
      const auto [t, y] = crossing(p, m_prev, q, m);
      cur = DelayPass{t, 0.0, 0.0, y, 0.0, false};
    } else if (in_prev && !in_now && cur) {
      const auto [t, y] = crossing(p, m_prev, q, m);
      cur->exit_t = t;
      cur->y_exit = y;
      cur->duration = t - cur->enter_t;
      if (cur->duration > 0.0) rep.passes.push_back(*cur);
      cur.reset();
    }
    m_prev = m;
  }
  if (cur) {
    cur->exit_t = pts.back().t;
    cur->y_exit = pts.back().y;
    cur->duration = cur->exit_t - cur->enter_t;
    cur->open = true;
    if (cur->duration > 0.0) rep.passes.push_back(*cur);
  }
  for (const auto& ps : rep.passes) rep.total_time += ps.duration;
  return rep;
}

/// Passes near both repulsive branches, merged in time order.
template <std::size_t N>
[[nodiscard]] std::vector<std::pair<std::string, DelayPass>> all_passes(
    const TrajectoryN<N>& traj, double delta) {
  std::vector<std::pair<std::string, DelayPass>> out;
  for (const char* b : {"x=+1", "x=-1"})
    for (const auto& p : delay_report(traj, b, delta).passes) out.emplace_back(b, p);
  std::sort(out.begin(), out.end(),
            [](const auto& l, const auto& r) { return l.second.enter_t < r.second.enter_t; });
  return out;
}

struct EnhancedDelayOutcome {
  bool found = false;
  // Position of the witness among all passes (both branches, time order).
  std::size_t pass_index = 0;
  std::string branch;
  DelayPass witness;
  std::vector<std::pair<std::string, DelayPass>> passes;
  std::vector<double> a_n;  // crossing amplitudes seen so far
  std::size_t crossings = 0;
  double t_reached = 0.0;
  Termination termination = Termination::TimeLimit;
};

struct EnhancedDelayBudget {
  double t_max = 1e5;
  std::uint64_t max_steps = 20'000'000;
};

/// Runs the enhanced system from (x0, y0) until some single residence pass
/// within delta of a repulsive branch lasts longer than T. A pass still open
/// at the end of a chunk qualifies once its duration exceeds T. When the
/// budget runs out first, `found` is false; that is not a disproof, and the
/// amplitudes a_n seen so far are reported.
[[nodiscard]] inline EnhancedDelayOutcome verify_enhanced_delay(double x0, double y0, double eps,
                                                                double delta, double T,
                                                                EnhancedDelayBudget budget = {},
                                                                ToleranceConfig tol = {}) {
  require(std::isfinite(x0) && std::abs(x0) < 1.0, ErrorKind::InvalidParameter,
          "x0 must satisfy |x0| < 1");
  require(std::isfinite(y0), ErrorKind::InvalidParameter, "y0 must be finite");
  require(std::isfinite(T) && T >= 0.0, ErrorKind::InvalidParameter, "T must be >= 0");
  require(std::isfinite(delta) && delta > 0.0 && delta < 1.0, ErrorKind::InvalidParameter,
          "delta must lie in (0, 1)");
  tol.max_steps = budget.max_steps;
  StripRunSpec spec{x0, y0, eps, delta, 0, budget.t_max, tol};

  auto witness = [&](const auto& passes) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < passes.size(); ++i)
      if (passes[i].second.duration > T) return i;
    return std::nullopt;
  };
  const auto traj = run_strip(spec, [&](const TrajectoryN<3>& tr) {
    return witness(all_passes(tr, delta)).has_value();
  });

  EnhancedDelayOutcome out;
  out.passes = all_passes(traj, delta);
  out.t_reached = traj.back().t;
  out.termination = traj.termination;
  if (const auto i = witness(out.passes)) {
    out.found = true;
    out.pass_index = *i;
    out.branch = out.passes[*i].first;
    out.witness = out.passes[*i].second;
  }
  const auto cr = crossing_sequences(traj, eps);
  out.a_n = cr.a_n();
  out.crossings = out.a_n.size();
  return out;
}

}  // namespace slowfast
