#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "slowfast/ode/steppers.hpp"
#include "slowfast/ode/types.hpp"

namespace slowfast {

enum class Stability { Attracting, Repelling, Neutral };

[[nodiscard]] constexpr std::string_view to_string(Stability s) noexcept {
  switch (s) {
    case Stability::Attracting: return "attracting";
    case Stability::Repelling: return "repelling";
    case Stability::Neutral: return "neutral";
  }
  return "?";
}

enum class Locus { VerticalLine, Diagonal, LambdaLine, Cubic };

/// A branch of the critical manifold (equilibria of the fast subsystem).
/// All point arguments are XY coordinates regardless of the model's chart.
struct ManifoldBranch {
  std::string id;
  Locus locus = Locus::VerticalLine;
  double value = 0.0;  // the constant of an x = const line
  // Fast-direction linearization d(xdot)/dx evaluated on the locus.
  std::function<double(const Vec2&)> transverse_eigenvalue;
  // Parametrization of the locus (by y for lines, by x for the cubic).
  std::function<Vec2(double)> point_at;
  std::function<bool(const Vec2&)> repulsive_region;
  std::vector<double> folds;

  [[nodiscard]] Stability stability(const Vec2& p) const {
    const double lam = transverse_eigenvalue(p);
    if (lam < 0.0) return Stability::Attracting;
    if (lam > 0.0) return Stability::Repelling;
    return Stability::Neutral;
  }
};

/// A named planar vector field plus the geometric data the analyses need.
/// Immutable after construction; safe to share across threads.
struct SystemModel {
  std::string name;
  std::map<std::string, double> params;
  Chart chart = Chart::XY;
  std::function<Vec2(double, const Vec2&)> field;
  // Optional analytic Jacobian; finite differences are used when empty.
  std::function<Mat<2>(double, const Vec2&)> jacobian_fn;
  std::vector<ManifoldBranch> invariant_manifolds;
  std::vector<EventSpec<2>> standard_events;

  Vec2 operator()(double t, const Vec2& q) const { return field(t, q); }

  [[nodiscard]] Mat<2> jacobian(double t, const Vec2& q) const {
    if (jacobian_fn) return jacobian_fn(t, q);
    const Vec2 fq = field(t, q);
    Mat<2> j{};
    const double sq = std::sqrt(std::numeric_limits<double>::epsilon());
    for (std::size_t c = 0; c < 2; ++c) {
      Vec2 qp = q;
      const double dq = sq * std::max(std::abs(q[c]), 1.0);
      qp[c] += dq;
      const Vec2 fp = field(t, qp);
      for (std::size_t r = 0; r < 2; ++r) j[r][c] = (fp[r] - fq[r]) / dq;
    }
    return j;
  }

  [[nodiscard]] double param(const std::string& key) const { return params.at(key); }

  [[nodiscard]] const ManifoldBranch& branch(std::string_view id) const {
    for (const auto& b : invariant_manifolds)
      if (b.id == id) return b;
    throw Error(ErrorKind::InvalidParameter, "model " + name + " has no branch " + std::string(id));
  }

  [[nodiscard]] std::vector<EventSpec<2>> events(std::initializer_list<std::string_view> ids) const {
    std::vector<EventSpec<2>> out;
    for (auto id : ids) {
      bool found = false;
      for (const auto& e : standard_events)
        if (e.id == id) {
          out.push_back(e);
          found = true;
        }
      require(found, ErrorKind::InvalidParameter,
              "model " + name + " has no standard event " + std::string(id));
    }
    return out;
  }
};

inline void require_positive_epsilon(double eps) {
  require(std::isfinite(eps) && eps > 0.0, ErrorKind::InvalidParameter,
          "epsilon must be > 0 (got " + std::to_string(eps) + ")");
}

}  // namespace slowfast
