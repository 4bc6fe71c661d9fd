#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "slowfast/ode/steppers.hpp"
#include "slowfast/ode/types.hpp"

namespace slowfast {

struct IntegrateOptions {
  Chart chart = Chart::XY;
  // Initial step; 0 selects one automatically.
  double initial_step = 0.0;
};

namespace detail {

inline bool crossed(double g0, double g1, Direction dir) {
  const bool rising = g0 < 0.0 && g1 >= 0.0;
  const bool falling = g0 > 0.0 && g1 <= 0.0;
  switch (dir) {
    case Direction::Rising: return rising;
    case Direction::Falling: return falling;
    case Direction::Any: return rising || falling;
  }
  return false;
}

template <std::size_t N>
double max_norm_scaled(const Vec<N>& v, const Vec<N>& q, const ToleranceConfig& tol) {
  double m = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    m = std::max(m, std::abs(v[i]) / (tol.abs_tol + tol.rel_tol * std::abs(q[i])));
  return m;
}

// Starting step heuristic from Hairer, Norsett & Wanner (vol. I, II.4).
template <std::size_t N, class F, class Stepper>
double initial_step(const F& f, const StateN<N>& s, const Vec<N>& f0,
                    const ToleranceConfig& tol, double span) {
  const double d0 = max_norm_scaled<N>(s.q, s.q, tol);
  const double d1 = max_norm_scaled<N>(f0, s.q, tol);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min({h0, tol.max_step, span});
  Vec<N> y1{};
  for (std::size_t i = 0; i < N; ++i) y1[i] = s.q[i] + h0 * f0[i];
  Vec<N> f1 = f(s.t + h0, y1);
  if (!all_finite<N>(f1)) return std::max(h0 * 1e-3, tol.min_step);
  Vec<N> df{};
  for (std::size_t i = 0; i < N; ++i) df[i] = f1[i] - f0[i];
  const double d2 = max_norm_scaled<N>(df, s.q, tol) / h0;
  const double dm = std::max(d1, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                : std::pow(0.01 / dm, 1.0 / Stepper::error_order);
  return std::min({100.0 * h0, h1, tol.max_step, span});
}

// Refines a sign change of g on (s0.t, s1.t]. States at trial times come from
// re-integrating a single step from s0, so the reported state is exactly the
// one g was evaluated at. Illinois (modified regula falsi) iterates never
// leave the bracket; every third iteration is a plain bisection.
template <std::size_t N, class F, class Stepper>
EventRecord<N> refine_crossing(const F& f, const Stepper& stepper, const StateN<N>& s0,
                               const Vec<N>& f0, const StateN<N>& s1, double g0, double g1,
                               const std::function<double(const StateN<N>&)>& g,
                               const ToleranceConfig& tol) {
  EventRecord<N> rec;
  rec.sign = g0 < 0.0 ? +1 : -1;
  if (g1 == 0.0) {
    rec.t_event = s1.t;
    rec.state = s1;
    rec.residual = 0.0;
    return rec;
  }

  auto state_at = [&](double t) {
    return stepper.template step<N>(f, s0, f0, t - s0.t, tol).state;
  };

  double a = s0.t, b = s1.t;
  StateN<N> sa = s0, sb = s1;
  double ga = g0, gb = g1;          // true values
  double fa = g0, fb = g1;          // Illinois-weighted values
  int side = 0;
  constexpr int kMaxIter = 80;
  for (int it = 0; it < kMaxIter; ++it) {
    if (b - a <= tol.event_tol_at(b)) break;
    double m;
    if (it % 3 == 2) {
      m = 0.5 * (a + b);
    } else {
      m = b - fb * (b - a) / (fb - fa);
      if (!(m > a && m < b) || !std::isfinite(m)) m = 0.5 * (a + b);
    }
    const StateN<N> sm = state_at(m);
    const double gm = g(sm);
    if (gm == 0.0) {
      a = b = m;
      sa = sb = sm;
      ga = gb = 0.0;
      break;
    }
    if ((gm > 0.0) == (gb > 0.0)) {
      b = m; sb = sm; gb = gm; fb = gm;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = m; sa = sm; ga = gm; fa = gm;
      if (side == +1) fb *= 0.5;
      side = +1;
    }
  }
  // Report the bracket end with the smaller residual; ties go to the
  // post-crossing side.
  if (std::abs(ga) < std::abs(gb) && a > s0.t) {
    rec.t_event = a; rec.state = sa; rec.residual = std::abs(ga);
  } else {
    rec.t_event = b; rec.state = sb; rec.residual = std::abs(gb);
  }
  return rec;
}

}  // namespace detail

/// Refines the event time of g inside a bracket of two states on the same
/// trajectory; the state at each trial time is obtained by re-integration
/// from the left end.
template <std::size_t N, class F, class Stepper = DormandPrince45>
EventRecord<N> locate_event(const F& field, const std::pair<StateN<N>, StateN<N>>& bracket,
                            const std::function<double(const StateN<N>&)>& g,
                            const ToleranceConfig& tol, const Stepper& stepper = {}) {
  const auto& [left, right] = bracket;
  require(right.t > left.t, ErrorKind::InvalidParameter, "bracket must satisfy left.t < right.t");
  const double gl = g(left), gr = g(right);
  if (!(gl * gr <= 0.0))
    throw Error(ErrorKind::NoBracket, "event function has the same sign at both bracket ends");
  if (gl == 0.0) return EventRecord<N>{"", left.t, left, 0.0, gr >= 0.0 ? +1 : -1};
  const Vec<N> f0 = detail::eval<N>(field, left.t, left.q);
  return detail::refine_crossing<N>(field, stepper, left, f0, right, gl, gr, g, tol);
}

/// Adaptive integration from q0 to t_end with event detection. Every sign
/// change of an event function across an accepted step yields one refined
/// EventRecord; a terminal event ends the run at the event state.
template <std::size_t N, class F, class Stepper = DormandPrince45>
TrajectoryN<N> integrate(const F& field, const StateN<N>& q0, double t_end,
                         const ToleranceConfig& tol,
                         std::type_identity_t<std::span<const EventSpec<N>>> events = {},
                         const IntegrateOptions& opts = {}, const Stepper& stepper = {}) {
  tol.validate();
  require(t_end > q0.t, ErrorKind::InvalidParameter, "t_end must be > q0.t");
  require(all_finite<N>(q0.q), ErrorKind::InvalidParameter, "initial state must be finite");

  TrajectoryN<N> traj;
  traj.chart = opts.chart;

  StateN<N> cur = q0;
  Vec<N> fcur = detail::eval<N>(field, cur.t, cur.q);
  traj.samples.push_back(cur);
  traj.derivatives.push_back(fcur);

  std::vector<double> gvals(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) gvals[i] = events[i].g(cur);

  double h = opts.initial_step > 0.0
                 ? opts.initial_step
                 : detail::initial_step<N, F, Stepper>(field, cur, fcur, tol, t_end - cur.t);
  double facold = 1e-4;
  const double expo = 1.0 / Stepper::error_order;
  const double expo1 = expo - 0.75 * Stepper::pi_beta;
  constexpr double safety = 0.9, fac_min = 0.2, fac_max = 10.0;
  std::uint64_t attempts = 0;

  while (true) {
    if (attempts >= tol.max_steps) {
      traj.termination = Termination::StepBudget;
      break;
    }
    h = std::min(h, tol.max_step);
    bool last = false;
    const double remaining = t_end - cur.t;
    if (h >= remaining * (1.0 - 1e-12)) {
      h = remaining;
      last = true;
    }
    if (h < tol.min_step && !last) {
      traj.termination = Termination::StepFloor;
      break;
    }

    ++attempts;
    std::optional<StepOutcome<N>> out;
    try {
      out = stepper.template step<N>(field, cur, fcur, h, tol);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NonFiniteField) throw;
    }
    const double err = out ? out->error : std::numeric_limits<double>::infinity();

    if (!(err <= 1.0)) {
      ++traj.rejected_steps;
      const double fac11 = std::isfinite(err) ? std::pow(err, expo1) : 1.0 / fac_min;
      h /= std::min(1.0 / fac_min, fac11 / safety);
      continue;
    }

    StateN<N> next = out->state;
    Vec<N> fnext = out->f_end;
    if (last) next.t = t_end;

    // Event detection on the accepted step.
    std::vector<std::pair<std::size_t, EventRecord<N>>> found;
    std::vector<double> gnext(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
      gnext[i] = events[i].g(next);
      if (detail::crossed(gvals[i], gnext[i], events[i].direction)) {
        auto rec = detail::refine_crossing<N>(field, stepper, cur, fcur, next, gvals[i],
                                              gnext[i], events[i].g, tol);
        rec.event_id = events[i].id;
        found.emplace_back(i, std::move(rec));
      }
    }
    std::stable_sort(found.begin(), found.end(), [](const auto& l, const auto& r) {
      return l.second.t_event < r.second.t_event;
    });

    std::optional<double> t_stop;
    for (const auto& [i, rec] : found) {
      if (events[i].terminal) {
        t_stop = rec.t_event;
        break;
      }
    }
    for (auto& [i, rec] : found) {
      if (t_stop && rec.t_event > *t_stop) break;
      traj.events.push_back(rec);
    }

    ++traj.accepted_steps;
    if (t_stop) {
      const auto& term = traj.events.back();
      if (term.state.t > cur.t) {
        traj.samples.push_back(term.state);
        traj.derivatives.push_back(detail::eval<N>(field, term.state.t, term.state.q));
      }
      traj.termination = Termination::TerminalEvent;
      break;
    }

    traj.samples.push_back(next);
    traj.derivatives.push_back(fnext);
    cur = next;
    fcur = fnext;
    gvals = std::move(gnext);
    if (last) {
      traj.termination = Termination::TimeLimit;
      break;
    }

    const double fac11 = std::pow(std::max(err, 1e-300), expo1);
    double fac = fac11 / std::pow(facold, Stepper::pi_beta);
    fac = std::clamp(fac / safety, 1.0 / fac_max, 1.0 / fac_min);
    facold = std::max(err, 1e-4);
    h /= fac;
  }
  return traj;
}

/// Integrates in consecutive chunks of length `chunk`, appending to one
/// trajectory, until `done(traj)` holds, t_max is reached, or the step budget
/// (shared across chunks) runs out.
template <std::size_t N, class F, class Done, class Stepper = DormandPrince45>
TrajectoryN<N> integrate_until(const F& field, const StateN<N>& q0, double chunk, double t_max,
                               const ToleranceConfig& tol,
                               std::type_identity_t<std::span<const EventSpec<N>>> events,
                               const IntegrateOptions& opts, Done&& done,
                               const Stepper& stepper = {}) {
  require(chunk > 0.0, ErrorKind::InvalidParameter, "chunk must be > 0");
  TrajectoryN<N> all;
  all.chart = opts.chart;
  all.samples.push_back(q0);
  all.derivatives.push_back(detail::eval<N>(field, q0.t, q0.q));
  StateN<N> cur = q0;
  while (cur.t < t_max) {
    const std::uint64_t used = all.accepted_steps + all.rejected_steps;
    if (used >= tol.max_steps) {
      all.termination = Termination::StepBudget;
      break;
    }
    ToleranceConfig part = tol;
    part.max_steps = tol.max_steps - used;
    const double t_end = std::min(cur.t + chunk, t_max);
    auto seg = integrate<N, F, Stepper>(field, cur, t_end, part, events, opts, stepper);
    all.samples.insert(all.samples.end(), seg.samples.begin() + 1, seg.samples.end());
    all.derivatives.insert(all.derivatives.end(), seg.derivatives.begin() + 1,
                           seg.derivatives.end());
    all.events.insert(all.events.end(), seg.events.begin(), seg.events.end());
    all.accepted_steps += seg.accepted_steps;
    all.rejected_steps += seg.rejected_steps;
    all.termination = seg.termination;
    cur = all.samples.back();
    if (seg.termination != Termination::TimeLimit || done(all)) break;
  }
  return all;
}

/// Dense evaluation of a trajectory at time t by cubic Hermite interpolation
/// between the bracketing accepted samples.
template <std::size_t N>
[[nodiscard]] StateN<N> sample_at(const TrajectoryN<N>& traj, double t) {
  const auto& s = traj.samples;
  require(!s.empty() && t >= s.front().t && t <= s.back().t, ErrorKind::InvalidParameter,
          "sample time outside the trajectory");
  auto it = std::lower_bound(s.begin(), s.end(), t,
                             [](const StateN<N>& st, double tt) { return st.t < tt; });
  if (it == s.begin()) return s.front();
  const std::size_t j = static_cast<std::size_t>(it - s.begin());
  if (it->t == t) return *it;
  return hermite<N>(s[j - 1], traj.derivatives[j - 1], s[j], traj.derivatives[j], t);
}

}  // namespace slowfast
