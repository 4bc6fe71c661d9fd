#pragma once

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "slowfast/canard/attractor.hpp"
#include "slowfast/error.hpp"

namespace slowfast {

struct CanardScan {
  double eps = 0.0;
  double c_low = 0.0;
  double c_high = 0.0;
  double width = 0.0;
  double threshold = 0.0;
  std::map<double, double> amplitudes;  // c -> amplitude, every evaluated point
  int iterations = 0;
  // Bisection stopped because the midpoint no longer separates the ends in
  // double precision, before tol_c was reached.
  bool at_floor = false;
  // Whether c_low sits on the large-amplitude side.
  bool low_is_large = false;

  [[nodiscard]] double midpoint() const { return 0.5 * (c_low + c_high); }
};

/// Bisects c for the point where the attractor amplitude crosses `threshold`.
/// Every evaluated midpoint replaces the bracket end with the same side, so
/// both ends classify differently throughout.
[[nodiscard]] inline CanardScan canard_bisect(double eps, std::pair<double, double> c_range,
                                              double threshold, double tol_c,
                                              const SummaryOptions& opt = {}) {
  auto [lo, hi] = c_range;
  require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, ErrorKind::InvalidParameter,
          "c_range must satisfy c_low < c_high");
  require(std::isfinite(threshold) && threshold > 0.0, ErrorKind::InvalidParameter,
          "threshold must be > 0");
  require(std::isfinite(tol_c) && tol_c > 0.0, ErrorKind::InvalidParameter, "tol_c must be > 0");

  SummaryOptions o = opt;
  if (!o.a_ref) o.a_ref = threshold;  // classification is not used here; skip the reference run
  CanardScan scan;
  scan.eps = eps;
  scan.threshold = threshold;
  auto amplitude = [&](double c) {
    const double a = detail::measure_attractor(eps, c, o).amplitude;
    scan.amplitudes[c] = a;
    return a;
  };
  const bool lo_large = amplitude(lo) >= threshold;
  const bool hi_large = amplitude(hi) >= threshold;
  if (lo_large == hi_large) {
    throw Error(ErrorKind::NoTransitionInRange,
                "amplitude is on the same side of " + std::to_string(threshold) +
                    " at both ends of c_range [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "]");
  }
  scan.low_is_large = lo_large;
  while (hi - lo > tol_c) {
    const double mid = lo + 0.5 * (hi - lo);
    if (!(mid > lo && mid < hi)) {
      scan.at_floor = true;
      break;
    }
    ++scan.iterations;
    if ((amplitude(mid) >= threshold) == lo_large)
      lo = mid;
    else
      hi = mid;
  }
  scan.c_low = lo;
  scan.c_high = hi;
  scan.width = hi - lo;
  return scan;
}

struct WindowPoint {
  double eps = 0.0;
  double a_ref = 0.0;
  CanardScan low;   // transition through low_fraction * a_ref
  CanardScan high;  // transition through high_fraction * a_ref
  double width = 0.0;
  double resolution = 0.0;  // combined bracket widths of the two transitions
  // Excluded from the fit: the width is not resolved by the brackets.
  bool at_floor = false;
};

struct WindowFit {
  std::vector<WindowPoint> points;  // in input order
  double slope = 0.0;               // d log(width) / d (1/eps)
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t used = 0;
};

struct WindowOptions {
  std::pair<double, double> c_range{-0.5, 0.05};
  double tol_c = 1e-14;
  SummaryOptions summary{};
};

/// Measures the canard window width(eps) = |c(high) - c(low)| for each eps,
/// each eps on its own thread, and fits log width against 1/eps.
[[nodiscard]] inline WindowFit window_scaling(const std::vector<double>& eps_list,
                                              std::pair<double, double> fractions = {0.2, 0.6},
                                              const WindowOptions& opt = {}) {
  if (eps_list.size() < 3)
    throw Error(ErrorKind::InsufficientData, "window_scaling needs at least 3 values of epsilon, got " +
                                                 std::to_string(eps_list.size()));
  const auto [low, high] = fractions;
  require(0.0 < low && low < high, ErrorKind::InvalidParameter,
          "amplitude thresholds must satisfy 0 < low < high");

  auto job = [&](double eps) {
    WindowPoint p;
    p.eps = eps;
    p.a_ref = reference_amplitude(eps, opt.summary);
    SummaryOptions so = opt.summary;
    so.a_ref = p.a_ref;
    p.low = canard_bisect(eps, opt.c_range, low * p.a_ref, opt.tol_c, so);
    p.high = canard_bisect(eps, opt.c_range, high * p.a_ref, opt.tol_c, so);
    p.width = std::abs(p.high.midpoint() - p.low.midpoint());
    p.resolution = p.low.width + p.high.width;
    p.at_floor = !(p.width > p.resolution);
    return p;
  };
  std::vector<std::future<WindowPoint>> futures;
  for (double eps : eps_list) futures.push_back(std::async(std::launch::async, job, eps));

  WindowFit fit;
  for (auto& f : futures) fit.points.push_back(f.get());

  std::vector<std::pair<double, double>> xy;
  for (const auto& p : fit.points)
    if (!p.at_floor) xy.emplace_back(1.0 / p.eps, std::log(p.width));
  fit.used = xy.size();
  if (xy.size() < 2)
    throw Error(ErrorKind::InsufficientData,
                "fewer than 2 epsilon values have a resolved window width");
  const double n = static_cast<double>(xy.size());
  double sx = 0, sy = 0;
  for (const auto& [x, y] : xy) { sx += x; sy += y; }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [x, y] : xy) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace slowfast
