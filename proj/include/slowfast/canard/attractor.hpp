#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string_view>

#include "slowfast/error.hpp"
#include "slowfast/models/vdp.hpp"
#include "slowfast/ode/integrate.hpp"

namespace slowfast {

enum class AttractorClass { Equilibrium, SmallCycle, CanardLike, Relaxation };

[[nodiscard]] constexpr std::string_view to_string(AttractorClass c) noexcept {
  switch (c) {
    case AttractorClass::Equilibrium: return "equilibrium";
    case AttractorClass::SmallCycle: return "small_cycle";
    case AttractorClass::CanardLike: return "canard_like";
    case AttractorClass::Relaxation: return "relaxation";
  }
  return "?";
}

/// Amplitude bands: equilibrium below `equilibrium`, relaxation at or above
/// high_fraction * a_ref, small cycle below low_fraction * a_ref, canard-like
/// in between.
struct ClassThresholds {
  double a_ref = 0.0;
  double equilibrium = 1e-4;
  double low_fraction = 0.2;
  double high_fraction = 0.6;
};

[[nodiscard]] inline AttractorClass classify(double amplitude, const ClassThresholds& th) {
  if (amplitude < th.equilibrium) return AttractorClass::Equilibrium;
  if (amplitude >= th.high_fraction * th.a_ref) return AttractorClass::Relaxation;
  if (amplitude < th.low_fraction * th.a_ref) return AttractorClass::SmallCycle;
  return AttractorClass::CanardLike;
}

struct AttractorSummary {
  double eps = 0.0;
  double c = 0.0;
  double amplitude = 0.0;  // max x - min x after the transient
  std::optional<double> period_estimate;
  AttractorClass cls = AttractorClass::Equilibrium;
  std::size_t extrema = 0;  // x-extremum events in the window
  double a_ref = 0.0;
  std::uint64_t steps = 0;
};

struct SummaryOptions {
  double transient = 0.0;  // 0: 20/eps
  double window = 0.0;     // 0: 40/eps
  std::optional<double> a_ref;
  ClassThresholds thresholds{};  // a_ref is filled in by attractor_summary
  ToleranceConfig tol{};
};

namespace detail {

// Amplitude and period of the van der Pol attractor without classification.
inline AttractorSummary measure_attractor(double eps, double c, const SummaryOptions& opt) {
  require_positive_epsilon(eps);
  const double transient = opt.transient > 0.0 ? opt.transient : 20.0 / eps;
  const double window = opt.window > 0.0 ? opt.window : 40.0 / eps;
  require(std::isfinite(window) && window > 0.0, ErrorKind::InvalidParameter,
          "window must be > 0");

  const SystemModel m = make_vdp_canard(eps, c);
  const auto warm = integrate<2>(m, State{0.0, {c + 0.01, vdp_f(c)}}, transient, opt.tol);
  auto incomplete = [&](const Trajectory& tr, const char* phase) {
    std::ostringstream msg;
    msg << "attractor run for eps=" << eps << " c=" << c << " stopped during " << phase << " at t="
        << tr.back().t << " (" << to_string(tr.termination) << ")";
    return Error(ErrorKind::IncompleteSummary, msg.str());
  };
  if (warm.termination != Termination::TimeLimit) throw incomplete(warm, "transient");

  ToleranceConfig rest = opt.tol;
  const std::uint64_t used = warm.accepted_steps + warm.rejected_steps;
  rest.max_steps = used < opt.tol.max_steps ? opt.tol.max_steps - used : 1;
  const auto ev = m.events({"x_extremum"});
  const auto tr = integrate<2>(m, warm.back(), transient + window, rest, ev);
  if (tr.termination != Termination::TimeLimit) throw incomplete(tr, "window");

  AttractorSummary s;
  s.eps = eps;
  s.c = c;
  s.steps = warm.accepted_steps + tr.accepted_steps;
  s.extrema = tr.events.size();
  double lo = 0.0, hi = 0.0;
  if (tr.events.size() >= 2) {
    lo = hi = tr.events.front().state.q[0];
    for (const auto& e : tr.events) {
      lo = std::min(lo, e.state.q[0]);
      hi = std::max(hi, e.state.q[0]);
    }
    // Same-direction extrema are one period apart.
    const int sign = tr.events.front().sign;
    double first = 0.0, last = 0.0;
    int n = 0;
    for (const auto& e : tr.events)
      if (e.sign == sign) {
        if (n == 0) first = e.t_event;
        last = e.t_event;
        ++n;
      }
    if (n >= 2) s.period_estimate = (last - first) / (n - 1);
  } else {
    lo = hi = tr.samples.front().q[0];
    for (const auto& st : tr.samples) {
      lo = std::min(lo, st.q[0]);
      hi = std::max(hi, st.q[0]);
    }
  }
  s.amplitude = hi - lo;
  return s;
}

}  // namespace detail

/// Amplitude of the deep-relaxation cycle at c = -1, the scale for the
/// classification bands.
[[nodiscard]] inline double reference_amplitude(double eps, const SummaryOptions& opt = {}) {
  SummaryOptions o = opt;
  o.a_ref.reset();
  return detail::measure_attractor(eps, -1.0, o).amplitude;
}

/// Integrates the van der Pol canard system from (c + 0.01, f(c)), discards
/// the transient and measures the x-amplitude over the window from the
/// detected x extrema (sample range when fewer than two extrema occur).
[[nodiscard]] inline AttractorSummary attractor_summary(double eps, double c,
                                                        const SummaryOptions& opt = {}) {
  AttractorSummary s = detail::measure_attractor(eps, c, opt);
  s.a_ref = opt.a_ref ? *opt.a_ref : (c == -1.0 ? s.amplitude : reference_amplitude(eps, opt));
  ClassThresholds th = opt.thresholds;
  th.a_ref = s.a_ref;
  s.cls = classify(s.amplitude, th);
  return s;
}

}  // namespace slowfast
