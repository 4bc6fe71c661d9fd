#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "slowfast/analysis/lyapunov.hpp"
#include "slowfast/error.hpp"
#include "slowfast/ode/types.hpp"

namespace slowfast {

/// Per-crossing quantities. Index n runs over the x = 0 crossings t_n; the
/// diagonal crossing theta_n is the one inside (t_n, t_{n+1}). Relations that
/// involve n+1 are stored on entry n and are NaN for the last entry.
struct CrossingEntry {
  int n = 0;
  double t = 0.0;
  double y = 0.0;  // y(t_n) = (-1)^n a_n
  double a = 0.0;
  double theta = std::numeric_limits<double>::quiet_NaN();
  double xi = std::numeric_limits<double>::quiet_NaN();  // x(theta_n) = tanh u
  // ln(1 - xi^2) = -2 ln cosh u(theta_n); finite even when xi rounds to +-1.
  double log_one_minus_xi2 = std::numeric_limits<double>::quiet_NaN();
  double integral = std::numeric_limits<double>::quiet_NaN();  // 2 eps int x^2 over [t_n, t_{n+1}]

  double res_w_t = 0.0;  // |a_n^2 - w(t_n)| / a_n^2
  double res_w_theta = std::numeric_limits<double>::quiet_NaN();  // |w(theta) + eps ln(1 - xi^2)| / |w|
  double res_telescoping = std::numeric_limits<double>::quiet_NaN();
  bool ineq_squares = true;  // a_{n+1}^2 - a_n^2 <= 2 eps (t_{n+1} - t_n)
  bool ineq_sum = true;      // a_n + a_{n+1} <= eps (t_{n+1} - t_n)
  bool has_next = false;
};

struct CrossingReport {
  double eps = 0.0;
  // Offset so that y(t_n) = (-1)^n a_n holds with n = first_index + position.
  int first_index = 0;
  std::vector<CrossingEntry> entries;
  bool alternating = true;
  bool interleaved = true;

  [[nodiscard]] std::vector<double> t_n() const { return column(&CrossingEntry::t); }
  [[nodiscard]] std::vector<double> a_n() const { return column(&CrossingEntry::a); }
  [[nodiscard]] std::vector<double> theta_n() const { return column(&CrossingEntry::theta); }
  [[nodiscard]] std::vector<double> xi_n() const { return column(&CrossingEntry::xi); }

  [[nodiscard]] double max_identity_residual() const {
    double m = 0.0;
    for (const auto& e : entries) {
      m = std::max(m, e.res_w_t);
      if (std::isfinite(e.res_w_theta)) m = std::max(m, e.res_w_theta);
      if (std::isfinite(e.res_telescoping)) m = std::max(m, e.res_telescoping);
    }
    return m;
  }

  [[nodiscard]] bool inequalities_hold() const {
    return std::all_of(entries.begin(), entries.end(),
                       [](const CrossingEntry& e) { return e.ineq_squares && e.ineq_sum; });
  }

  /// Keeps the first n crossings. The last kept entry keeps its relations to
  /// the dropped one, matching a run stopped right after t_n.
  void truncate(std::size_t n) {
    if (entries.size() > n) entries.resize(n);
  }

 private:
  [[nodiscard]] std::vector<double> column(double CrossingEntry::*m) const {
    std::vector<double> v;
    v.reserve(entries.size());
    for (const auto& e : entries) v.push_back(e.*m);
    return v;
  }
};

namespace detail {

template <std::size_t N>
double integral_component(const StateN<N>& s) {
  if constexpr (N >= 3)
    return s.q[2];
  else
    return std::numeric_limits<double>::quiet_NaN();
}

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace detail

/// Extracts t_n, a_n, theta_n, xi_n from the `x_zero` and `diagonal` events of
/// a UY-chart enhanced-system trajectory and evaluates the Lyapunov-function
/// identities and inequalities. With an augmented trajectory (third component
/// S = 2 eps int x^2 dt) the telescoping identity a_{n+1}^2 - a_n^2 = S(t_{n+1})
/// - S(t_n) is checked too.
template <std::size_t N>
[[nodiscard]] CrossingReport crossing_sequences(const TrajectoryN<N>& traj, double eps) {
  require(traj.chart == Chart::UY, ErrorKind::MalformedTrajectory,
          "crossing_sequences needs a UY-chart trajectory");
  CrossingReport rep;
  rep.eps = eps;

  std::vector<const EventRecord<N>*> zeros, diags;
  for (const auto& e : traj.events) {
    if (e.event_id == "x_zero") zeros.push_back(&e);
    if (e.event_id == "diagonal") diags.push_back(&e);
  }
  for (std::size_t i = 1; i < zeros.size(); ++i)
    if (!(zeros[i]->t_event > zeros[i - 1]->t_event))
      throw Error(ErrorKind::MalformedTrajectory, "x = 0 crossing times are not increasing");
  if (zeros.empty()) return rep;

  rep.first_index = zeros.front()->state.q[1] > 0.0 ? 0 : 1;
  const double t_last = traj.samples.empty() ? zeros.back()->t_event : traj.samples.back().t;

  for (std::size_t i = 0; i < zeros.size(); ++i) {
    const auto& z = *zeros[i];
    CrossingEntry e;
    e.n = rep.first_index + static_cast<int>(i);
    e.t = z.t_event;
    e.y = z.state.q[1];
    e.a = std::abs(e.y);
    const double a2 = e.a * e.a;
    e.res_w_t = detail::rel_diff(a2, w_uy(z.state.q[0], z.state.q[1], eps));

    const double t_hi = i + 1 < zeros.size() ? zeros[i + 1]->t_event : t_last;
    std::vector<const EventRecord<N>*> inside;
    for (const auto* d : diags)
      if (d->t_event > e.t && d->t_event < t_hi) inside.push_back(d);
    if (i + 1 < zeros.size() && inside.size() != 1)
      throw Error(ErrorKind::MalformedTrajectory,
                  "expected exactly one diagonal crossing between t_" + std::to_string(e.n) +
                      " and t_" + std::to_string(e.n + 1) + ", found " +
                      std::to_string(inside.size()));
    if (!inside.empty()) {
      const auto& d = *inside.front();
      const double u = d.state.q[0];
      e.theta = d.t_event;
      e.xi = std::tanh(u);
      e.log_one_minus_xi2 = -2.0 * log_cosh(u);
      const double w_theta = w_uy(u, d.state.q[1], eps);
      e.res_w_theta = detail::rel_diff(w_theta, -eps * e.log_one_minus_xi2);
    }

    const int expected_sign = (e.n % 2 == 0) ? 1 : -1;
    if ((e.y > 0.0 ? 1 : -1) != expected_sign) rep.alternating = false;

    if (i + 1 < zeros.size()) {
      const auto& z1 = *zeros[i + 1];
      const double a1 = std::abs(z1.state.q[1]);
      const double dt = z1.t_event - e.t;
      const double lhs = a1 * a1 - a2;
      e.has_next = true;
      e.integral = detail::integral_component<N>(z1.state) - detail::integral_component<N>(z.state);
      if (std::isfinite(e.integral))
        e.res_telescoping = std::abs(lhs - e.integral) / std::abs(lhs);
      e.ineq_squares = lhs <= 2.0 * eps * dt;
      e.ineq_sum = e.a + a1 <= eps * dt;
    }
    rep.entries.push_back(e);
  }
  return rep;
}

/// Increments a_{n+1} - a_n and how close they are to their asymptotic value
/// 2 (x^2 ~ 1 away from the transitions turns the telescoping identity into
/// a_{n+1}^2 - a_n^2 ~ 2 (a_n + a_{n+1})).
struct GrowthFit {
  std::vector<double> increments;
  bool strictly_increasing = true;
  double slope = 0.0;  // least-squares slope of the increments against n
  // max_k |increment_k - 2| / 2 over k >= from_index
  double max_rel_deviation_from_two = 0.0;
  std::size_t from_index = 0;
  bool approaches_two = false;
};

[[nodiscard]] inline GrowthFit a_n_growth(const CrossingReport& report, std::size_t from_index = 0,
                                          double rel_band = 0.05) {
  const auto a = report.a_n();
  if (a.size() < 5)
    throw Error(ErrorKind::InsufficientData,
                "a_n growth needs at least 5 crossings, got " + std::to_string(a.size()));
  GrowthFit fit;
  fit.from_index = from_index;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    fit.increments.push_back(a[i + 1] - a[i]);
    if (!(a[i + 1] > a[i])) fit.strictly_increasing = false;
  }
  const auto m = static_cast<double>(fit.increments.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < fit.increments.size(); ++i) {
    const double x = static_cast<double>(i), y = fit.increments[i];
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  const double den = m * sxx - sx * sx;
  fit.slope = den != 0.0 ? (m * sxy - sx * sy) / den : 0.0;
  bool any = false;
  for (std::size_t i = from_index; i < fit.increments.size(); ++i) {
    fit.max_rel_deviation_from_two =
        std::max(fit.max_rel_deviation_from_two, std::abs(fit.increments[i] - 2.0) / 2.0);
    any = true;
  }
  fit.approaches_two = any && fit.max_rel_deviation_from_two <= rel_band;
  return fit;
}

}  // namespace slowfast
