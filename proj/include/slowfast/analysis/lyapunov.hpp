#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "slowfast/error.hpp"
#include "slowfast/models/charts.hpp"
#include "slowfast/ode/types.hpp"

namespace slowfast {

/// Phi(u, y) = (tanh u - y)^2 / 2 + eps ln cosh u, increasing along the
/// enhanced flow in the UY chart.
[[nodiscard]] inline double phi(double u, double y, double eps) noexcept {
  const double d = std::tanh(u) - y;
  return 0.5 * d * d + eps * log_cosh(u);
}

/// w(x, y) = (x - y)^2 - eps ln|1 - x^2|; equals 2 Phi under x = tanh u.
[[nodiscard]] inline double w(double x, double y, double eps) {
  const double ax = std::abs(x);
  if (ax == 1.0) throw Error(ErrorKind::SingularLog, "w is singular on |x| = 1");
  const double log_term = ax < 1.0 ? log_one_minus_x2(x) : std::log(x * x - 1.0);
  return (x - y) * (x - y) - eps * log_term;
}

/// w expressed in the UY chart (= 2 Phi), valid where x has rounded to +-1.
[[nodiscard]] inline double w_uy(double u, double y, double eps) noexcept {
  return 2.0 * phi(u, y, eps);
}

/// dPhi/dt = (udot / cosh u)^2 with udot = tanh u - y.
[[nodiscard]] inline double phi_rate(double u, double y) noexcept {
  const double udot = std::tanh(u) - y;
  return udot * udot * sech2(u);
}

/// dw/dt = 2 (1 - x^2)(x - y)^2 in fast time.
[[nodiscard]] inline double w_rate(double x, double y) noexcept {
  return 2.0 * (1.0 - x * x) * (x - y) * (x - y);
}

struct LyapunovSample {
  double t = 0.0;
  double value = 0.0;       // Phi in the UY chart, w in the XY chart
  double derivative = 0.0;  // analytic time derivative of `value`
};

struct LyapunovSeries {
  Chart chart = Chart::UY;
  std::vector<LyapunovSample> samples;
  // Largest drop value[i] - value[i+1] over consecutive samples (<= 0 when
  // the series is increasing) and where it happens.
  double worst_decrease = 0.0;
  std::size_t worst_index = 0;
  bool monotone = true;
};

/// Evaluates the Lyapunov function along a strip trajectory of the enhanced
/// system and checks it is non-decreasing up to `slack`.
template <std::size_t N>
[[nodiscard]] LyapunovSeries lyapunov_series(const TrajectoryN<N>& traj, double eps,
                                             double slack = 1e-12) {
  static_assert(N >= 2);
  require(traj.chart == Chart::UY || traj.chart == Chart::XY, ErrorKind::InvalidParameter,
          "lyapunov_series needs a UY or XY trajectory");
  LyapunovSeries s;
  s.chart = traj.chart;
  s.samples.reserve(traj.samples.size());
  for (const auto& st : traj.samples) {
    const double a = st.q[0], y = st.q[1];
    if (traj.chart == Chart::UY)
      s.samples.push_back({st.t, phi(a, y, eps), phi_rate(a, y)});
    else
      s.samples.push_back({st.t, w(a, y, eps), w_rate(a, y)});
  }
  s.worst_decrease = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < s.samples.size(); ++i) {
    const double drop = s.samples[i - 1].value - s.samples[i].value;
    if (drop > s.worst_decrease) {
      s.worst_decrease = drop;
      s.worst_index = i;
    }
  }
  if (s.samples.size() < 2) s.worst_decrease = 0.0;
  s.monotone = s.worst_decrease <= slack;
  return s;
}

}  // namespace slowfast
