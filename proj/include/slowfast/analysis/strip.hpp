#pragma once

#include <cmath>
#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

#include "slowfast/models/charts.hpp"
#include "slowfast/models/enhanced.hpp"
#include "slowfast/ode/integrate.hpp"

namespace slowfast {

/// Enhanced system in the UY chart augmented with S = 2 eps int x^2 dt, so
/// the telescoping identity is checked against a quantity carrying the
/// integrator's own accuracy. State: (u, y, S).
struct AugmentedStripField {
  double eps;

  Vec<3> operator()(double, const Vec<3>& q) const {
    const double x = std::tanh(q[0]);
    return {x - q[1], eps * x, 2.0 * eps * x * x};
  }
};

[[nodiscard]] inline EventSpec<3> lift_event(const EventSpec<2>& e) {
  auto g2 = e.g;
  return {e.id, [g2](const StateN<3>& s) { return g2(State{s.t, {s.q[0], s.q[1]}}); },
          e.direction, e.terminal};
}

[[nodiscard]] inline std::vector<EventSpec<3>> lift_events(const std::vector<EventSpec<2>>& in) {
  std::vector<EventSpec<3>> out;
  out.reserve(in.size());
  for (const auto& e : in) out.push_back(lift_event(e));
  return out;
}

struct StripRunSpec {
  double x0 = 0.5;
  double y0 = 0.0;
  double eps = 0.01;
  double delta = 0.05;
  // Stop once this many x = 0 crossings were seen (0: run to t_max).
  std::size_t n_crossings = 0;
  double t_max = 1e7;
  ToleranceConfig tol{};
};

/// Integrates the augmented enhanced system from an XY strip point with all
/// standard events enabled (crossings, diagonal, bands, repulsive regions),
/// in chunks of 50/eps until `done(traj)` holds or t_max is reached.
template <class Done>
[[nodiscard]] TrajectoryN<3> run_strip(const StripRunSpec& spec, Done&& done) {
  const SystemModel model = make_enhanced_delay(spec.eps, Chart::UY, spec.delta);
  const Vec2 uy = chart_transform({spec.x0, spec.y0}, Chart::XY, Chart::UY);
  const auto events = lift_events(model.standard_events);
  const AugmentedStripField field{spec.eps};
  return integrate_until<3>(field, StateN<3>{0.0, {uy[0], uy[1], 0.0}}, 50.0 / spec.eps,
                            spec.t_max, spec.tol, events, IntegrateOptions{Chart::UY},
                            std::forward<Done>(done));
}

[[nodiscard]] inline std::size_t count_events(const TrajectoryN<3>& tr, std::string_view id) {
  std::size_t n = 0;
  for (const auto& e : tr.events)
    if (e.event_id == id) ++n;
  return n;
}

/// Runs until spec.n_crossings x = 0 crossings were seen (0: to t_max).
[[nodiscard]] inline TrajectoryN<3> run_strip(const StripRunSpec& spec) {
  const std::size_t want = spec.n_crossings;
  return run_strip(spec, [want](const TrajectoryN<3>& tr) {
    return want != 0 && count_events(tr, "x_zero") >= want;
  });
}

}  // namespace slowfast
