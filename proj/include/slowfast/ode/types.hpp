#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "slowfast/error.hpp"

namespace slowfast {

template <std::size_t N>
using Vec = std::array<double, N>;

using Vec2 = Vec<2>;

/// Coordinate chart a trajectory is expressed in.
///   XY: (x, y) on the whole plane
///   UY: (u, y) with x = tanh u, valid on the open strip |x| < 1
///   XG: (x, g) with g = y - x, used outside the strip where the gap to the
///       diagonal is far below the resolution of x itself
enum class Chart { XY, UY, XG };

[[nodiscard]] constexpr std::string_view to_string(Chart c) noexcept {
  switch (c) {
    case Chart::XY: return "xy";
    case Chart::UY: return "uy";
    case Chart::XG: return "xg";
  }
  return "?";
}

template <std::size_t N>
struct StateN {
  double t = 0.0;
  Vec<N> q{};

  friend bool operator==(const StateN&, const StateN&) = default;
};

using State = StateN<2>;

template <std::size_t N>
[[nodiscard]] bool all_finite(const Vec<N>& v) noexcept {
  for (double c : v)
    if (!std::isfinite(c)) return false;
  return true;
}

struct ToleranceConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double max_step = 1.0;
  double min_step = 1e-13;
  // Base event tolerance; the effective value at time t is
  // event_time_tol * max(1, |t|).
  double event_time_tol = 1e-12;
  std::uint64_t max_steps = 50'000'000;

  [[nodiscard]] double event_tol_at(double t) const noexcept {
    return event_time_tol * std::max(1.0, std::abs(t));
  }

  void validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    require(positive(rel_tol), ErrorKind::InvalidParameter, "rel_tol must be > 0");
    require(positive(abs_tol), ErrorKind::InvalidParameter, "abs_tol must be > 0");
    require(positive(max_step), ErrorKind::InvalidParameter, "max_step must be > 0");
    require(positive(min_step), ErrorKind::InvalidParameter, "min_step must be > 0");
    require(min_step < max_step, ErrorKind::InvalidParameter, "min_step must be < max_step");
    require(positive(event_time_tol), ErrorKind::InvalidParameter,
            "event_time_tol must be > 0");
    require(max_steps >= 1, ErrorKind::InvalidParameter, "max_steps must be >= 1");
  }

  friend bool operator==(const ToleranceConfig&, const ToleranceConfig&) = default;
};

enum class Direction { Rising, Falling, Any };

template <std::size_t N>
struct EventSpec {
  std::string id;
  std::function<double(const StateN<N>&)> g;
  Direction direction = Direction::Any;
  bool terminal = false;
};

template <std::size_t N>
struct EventRecord {
  std::string event_id;
  double t_event = 0.0;
  StateN<N> state;
  double residual = 0.0;
  // +1 when g went from negative to non-negative, -1 otherwise.
  int sign = 0;
};

enum class Termination { TimeLimit, TerminalEvent, StepFloor, StepBudget };

[[nodiscard]] constexpr std::string_view to_string(Termination t) noexcept {
  switch (t) {
    case Termination::TimeLimit: return "time_limit";
    case Termination::TerminalEvent: return "terminal_event";
    case Termination::StepFloor: return "step_floor";
    case Termination::StepBudget: return "step_budget";
  }
  return "?";
}

template <std::size_t N>
struct TrajectoryN {
  Chart chart = Chart::XY;
  std::vector<StateN<N>> samples;
  // Field value at each sample, kept for Hermite interpolation and for
  // derivative-based monitors.
  std::vector<Vec<N>> derivatives;
  std::vector<EventRecord<N>> events;
  Termination termination = Termination::TimeLimit;
  std::uint64_t accepted_steps = 0;
  std::uint64_t rejected_steps = 0;

  [[nodiscard]] const StateN<N>& back() const { return samples.back(); }

  [[nodiscard]] std::vector<const EventRecord<N>*> events_with_id(
      std::string_view id) const {
    std::vector<const EventRecord<N>*> out;
    for (const auto& e : events)
      if (e.event_id == id) out.push_back(&e);
    return out;
  }
};

using Trajectory = TrajectoryN<2>;

}  // namespace slowfast
