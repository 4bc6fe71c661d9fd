#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <sstream>

#include "slowfast/ode/types.hpp"

namespace slowfast {

// A planar (or small augmented) vector field: f(t, q) -> dq/dt.
template <class F, std::size_t N>
concept VectorField = requires(const F& f, double t, const Vec<N>& q) {
  { f(t, q) } -> std::convertible_to<Vec<N>>;
};

template <std::size_t N>
using Mat = std::array<Vec<N>, N>;

// Fields may expose an analytic Jacobian; the implicit stepper falls back to
// finite differences otherwise.
template <class F, std::size_t N>
concept HasJacobian = requires(const F& f, double t, const Vec<N>& q) {
  { f.jacobian(t, q) } -> std::convertible_to<Mat<N>>;
};

namespace detail {

template <std::size_t N>
[[noreturn]] void throw_non_finite(double t, const Vec<N>& q) {
  std::ostringstream os;
  os.precision(17);
  os << "field evaluation is not finite at t=" << t << ", q=(";
  for (std::size_t i = 0; i < N; ++i) os << (i ? ", " : "") << q[i];
  os << ")";
  throw Error(ErrorKind::NonFiniteField, os.str());
}

template <std::size_t N, class F>
Vec<N> eval(const F& f, double t, const Vec<N>& q) {
  Vec<N> d = f(t, q);
  if (!all_finite<N>(d)) throw_non_finite<N>(t, q);
  return d;
}

// Mixed error norm: max_i |e_i| / (abs_tol + rel_tol * max(|q_i|, |q_new_i|)).
template <std::size_t N>
double error_norm(const Vec<N>& e, const Vec<N>& q0, const Vec<N>& q1,
                  const ToleranceConfig& tol) {
  double err = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sc =
        tol.abs_tol + tol.rel_tol * std::max(std::abs(q0[i]), std::abs(q1[i]));
    err = std::max(err, std::abs(e[i]) / sc);
  }
  return err;
}

// Gaussian elimination with partial pivoting; N is 2 or 3 here.
template <std::size_t N>
Vec<N> solve(Mat<N> a, Vec<N> b) {
  for (std::size_t col = 0; col < N; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < N; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    const double d = a[col][col];
    for (std::size_t r = col + 1; r < N; ++r) {
      const double m = a[r][col] / d;
      for (std::size_t c = col; c < N; ++c) a[r][c] -= m * a[col][c];
      b[r] -= m * b[col];
    }
  }
  Vec<N> x{};
  for (std::size_t i = N; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < N; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

}  // namespace detail

template <std::size_t N>
struct StepOutcome {
  StateN<N> state;
  Vec<N> f_end{};  // field at the new state
  double error = 0.0;  // normalized; the step is acceptable iff error <= 1
};

/// Dormand-Prince 5(4) embedded pair. The propagated solution is the
/// fifth-order one; the embedded fourth-order solution only drives the error
/// estimate. The last stage is evaluated at the new point (FSAL).
struct DormandPrince45 {
  static constexpr int error_order = 5;
  static constexpr double pi_beta = 0.04;

  template <std::size_t N, class F>
  StepOutcome<N> step(const F& f, const StateN<N>& s, const Vec<N>& k1, double h,
                      const ToleranceConfig& tol) const {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                     a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                     b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const double t = s.t;
    const Vec<N>& y = s.q;
    Vec<N> tmp{};

    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    const Vec<N> k2 = detail::eval<N>(f, t + c2 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    const Vec<N> k3 = detail::eval<N>(f, t + c3 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    const Vec<N> k4 = detail::eval<N>(f, t + c4 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    const Vec<N> k5 = detail::eval<N>(f, t + c5 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                           a65 * k5[i]);
    const Vec<N> k6 = detail::eval<N>(f, t + h, tmp);

    StepOutcome<N> out;
    out.state.t = t + h;
    for (std::size_t i = 0; i < N; ++i)
      out.state.q[i] =
          y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    out.f_end = detail::eval<N>(f, t + h, out.state.q);

    Vec<N> e{};
    for (std::size_t i = 0; i < N; ++i)
      e[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                  e7 * out.f_end[i]);
    out.error = detail::error_norm<N>(e, y, out.state.q, tol);
    return out;
  }
};

/// Linearly implicit Rosenbrock 2(3) pair (the L-stable method behind
/// MATLAB's ode23s). Used where the fast relaxation rate grows without bound,
/// e.g. the enhanced system outside the strip.
struct Rosenbrock23 {
  static constexpr int error_order = 3;
  static constexpr double pi_beta = 0.0;

  template <std::size_t N, class F>
  static Mat<N> jacobian(const F& f, double t, const Vec<N>& q, const Vec<N>& fq) {
    if constexpr (HasJacobian<F, N>) {
      return f.jacobian(t, q);
    } else {
      Mat<N> j{};
      const double sq = std::sqrt(std::numeric_limits<double>::epsilon());
      for (std::size_t c = 0; c < N; ++c) {
        Vec<N> qp = q;
        const double dq = sq * std::max(std::abs(q[c]), 1.0);
        qp[c] += dq;
        const Vec<N> fp = detail::eval<N>(f, t, qp);
        for (std::size_t r = 0; r < N; ++r) j[r][c] = (fp[r] - fq[r]) / dq;
      }
      return j;
    }
  }

  template <std::size_t N, class F>
  StepOutcome<N> step(const F& f, const StateN<N>& s, const Vec<N>& f0, double h,
                      const ToleranceConfig& tol) const {
    const double d = 1.0 / (2.0 + std::sqrt(2.0));
    const double e32 = 6.0 + std::sqrt(2.0);
    const double t = s.t;
    const Vec<N>& y = s.q;

    const Mat<N> jac = jacobian<N>(f, t, y, f0);
    const double dt = std::sqrt(std::numeric_limits<double>::epsilon()) *
                      std::max(std::abs(t), 1.0);
    const Vec<N> ft = detail::eval<N>(f, t + dt, y);
    Vec<N> tder{};
    for (std::size_t i = 0; i < N; ++i) tder[i] = (ft[i] - f0[i]) / dt;

    Mat<N> w{};
    for (std::size_t r = 0; r < N; ++r)
      for (std::size_t c = 0; c < N; ++c) w[r][c] = (r == c ? 1.0 : 0.0) - h * d * jac[r][c];

    Vec<N> rhs{};
    for (std::size_t i = 0; i < N; ++i) rhs[i] = f0[i] + h * d * tder[i];
    const Vec<N> k1 = detail::solve<N>(w, rhs);

    Vec<N> tmp{};
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    const Vec<N> f1 = detail::eval<N>(f, t + 0.5 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) rhs[i] = f1[i] - k1[i];
    Vec<N> k2 = detail::solve<N>(w, rhs);
    for (std::size_t i = 0; i < N; ++i) k2[i] += k1[i];

    StepOutcome<N> out;
    out.state.t = t + h;
    for (std::size_t i = 0; i < N; ++i) out.state.q[i] = y[i] + h * k2[i];
    if (!all_finite<N>(out.state.q)) detail::throw_non_finite<N>(t + h, out.state.q);
    out.f_end = detail::eval<N>(f, t + h, out.state.q);

    for (std::size_t i = 0; i < N; ++i)
      rhs[i] = out.f_end[i] - e32 * (k2[i] - f1[i]) - 2.0 * (k1[i] - f0[i]) +
               h * d * tder[i];
    const Vec<N> k3 = detail::solve<N>(w, rhs);

    Vec<N> e{};
    for (std::size_t i = 0; i < N; ++i) e[i] = h / 6.0 * (k1[i] - 2.0 * k2[i] + k3[i]);
    out.error = detail::error_norm<N>(e, y, out.state.q, tol);
    return out;
  }
};

/// One embedded Runge-Kutta step of size h from `state`.
template <std::size_t N, class F, class Stepper = DormandPrince45>
StepOutcome<N> step(const F& field, const StateN<N>& state, double h,
                    const ToleranceConfig& tol, const Stepper& stepper = {}) {
  require(h > 0.0 && std::isfinite(h), ErrorKind::InvalidParameter, "step size must be > 0");
  const Vec<N> f0 = detail::eval<N>(field, state.t, state.q);
  return stepper.template step<N>(field, state, f0, h, tol);
}

/// Cubic Hermite interpolation between two accepted states.
template <std::size_t N>
[[nodiscard]] StateN<N> hermite(const StateN<N>& s0, const Vec<N>& f0,
                                const StateN<N>& s1, const Vec<N>& f1, double t) {
  const double h = s1.t - s0.t;
  const double th = (t - s0.t) / h;
  const double th2 = th * th, th3 = th2 * th;
  const double h00 = 2 * th3 - 3 * th2 + 1, h10 = th3 - 2 * th2 + th;
  const double h01 = -2 * th3 + 3 * th2, h11 = th3 - th2;
  StateN<N> out;
  out.t = t;
  for (std::size_t i = 0; i < N; ++i)
    out.q[i] = h00 * s0.q[i] + h10 * h * f0[i] + h01 * s1.q[i] + h11 * h * f1[i];
  return out;
}

}  // namespace slowfast
