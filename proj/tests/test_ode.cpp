#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "slowfast/analysis/bernoulli.hpp"
#include "slowfast/models/charts.hpp"
#include "slowfast/models/enhanced.hpp"
#include "slowfast/models/transcritical.hpp"
#include "slowfast/ode/integrate.hpp"

using namespace slowfast;

namespace {

struct Zero {
  Vec2 operator()(double, const Vec2&) const { return {0.0, 0.0}; }
};
struct UnitDrift {
  Vec2 operator()(double, const Vec2&) const { return {1.0, 0.0}; }
};
struct Oscillator {
  Vec2 operator()(double, const Vec2& q) const { return {q[1], -q[0]}; }
};
struct Decay {
  Vec2 operator()(double, const Vec2& q) const { return {-q[0], -2.0 * q[1]}; }
};
struct Explodes {
  Vec2 operator()(double, const Vec2& q) const {
    return {q[0] > 1.0 ? std::numeric_limits<double>::quiet_NaN() : 1.0, 0.0};
  }
};

}  // namespace

TEST(Step, StationaryFieldLeavesStateUnchanged) {
  const auto out = step<2>(Zero{}, State{1.0, {0.3, -2.0}}, 0.7, ToleranceConfig{});
  EXPECT_EQ(out.state.q, (Vec2{0.3, -2.0}));
  EXPECT_DOUBLE_EQ(out.state.t, 1.7);
  EXPECT_EQ(out.error, 0.0);
}

TEST(Step, ConstantFieldIsExact) {
  const auto out = step<2>(UnitDrift{}, State{0.0, {0.0, 0.0}}, 0.5, ToleranceConfig{});
  EXPECT_DOUBLE_EQ(out.state.q[0], 0.5);
  EXPECT_EQ(out.state.q[1], 0.0);
  EXPECT_LT(out.error, 1e-12);
}

TEST(Step, EquilibriumOfEnhancedSystem) {
  const auto m = make_enhanced_delay(0.1, Chart::XY);
  const auto out = step<2>(m, State{0.0, {0.0, 0.0}}, 0.25, ToleranceConfig{});
  EXPECT_EQ(out.state.q, (Vec2{0.0, 0.0}));
}

TEST(Step, RosenbrockConstantFieldIsExact) {
  const auto out =
      step<2>(UnitDrift{}, State{0.0, {0.0, 0.0}}, 0.5, ToleranceConfig{}, Rosenbrock23{});
  EXPECT_NEAR(out.state.q[0], 0.5, 1e-15);
  EXPECT_NEAR(out.state.q[1], 0.0, 1e-15);
}

TEST(Step, NonFiniteFieldIsReported) {
  try {
    (void)step<2>(Explodes{}, State{0.0, {2.0, 0.0}}, 0.1, ToleranceConfig{});
    FAIL() << "expected NonFiniteField";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonFiniteField);
    EXPECT_NE(std::string(e.what()).find("t="), std::string::npos);
  }
}

TEST(Step, RejectsNonPositiveStep) {
  EXPECT_THROW((void)step<2>(Zero{}, State{}, 0.0, ToleranceConfig{}), Error);
  EXPECT_THROW((void)step<2>(Zero{}, State{}, -1.0, ToleranceConfig{}), Error);
}

TEST(Tolerances, ValidationNamesTheField) {
  ToleranceConfig t;
  t.min_step = 2.0;
  t.max_step = 1.0;
  try {
    t.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("min_step"), std::string::npos);
  }
  ToleranceConfig z;
  z.max_steps = 0;
  EXPECT_THROW(z.validate(), Error);
}

TEST(Integrate, OscillatorAccuracy) {
  const auto tr = integrate<2>(Oscillator{}, State{0.0, {1.0, 0.0}}, 10.0, ToleranceConfig{});
  EXPECT_EQ(tr.termination, Termination::TimeLimit);
  EXPECT_DOUBLE_EQ(tr.back().t, 10.0);
  EXPECT_NEAR(tr.back().q[0], std::cos(10.0), 1e-8);
  EXPECT_NEAR(tr.back().q[1], -std::sin(10.0), 1e-8);
}

TEST(Integrate, SampleTimesStrictlyIncrease) {
  const auto tr = integrate<2>(Oscillator{}, State{0.0, {1.0, 0.0}}, 20.0, ToleranceConfig{});
  for (std::size_t i = 1; i < tr.samples.size(); ++i)
    ASSERT_LT(tr.samples[i - 1].t, tr.samples[i].t);
  ASSERT_EQ(tr.samples.size(), tr.derivatives.size());
}

TEST(Integrate, EventTimesOfOscillator) {
  std::vector<EventSpec<2>> ev{{"q0_zero", [](const State& s) { return s.q[0]; }}};
  const auto tr = integrate<2>(Oscillator{}, State{0.0, {1.0, 0.0}}, 10.0, ToleranceConfig{}, ev);
  ASSERT_EQ(tr.events.size(), 3u);  // pi/2, 3pi/2, 5pi/2
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_NEAR(tr.events[k].t_event, std::numbers::pi * (0.5 + static_cast<double>(k)), 1e-9);
    EXPECT_LE(tr.events[k].residual, 1e-9);
  }
  EXPECT_EQ(tr.events[0].sign, -1);
  EXPECT_EQ(tr.events[1].sign, +1);
}

TEST(Integrate, EventDirectionFilter) {
  std::vector<EventSpec<2>> ev{
      {"rising", [](const State& s) { return s.q[0]; }, Direction::Rising}};
  const auto tr = integrate<2>(Oscillator{}, State{0.0, {1.0, 0.0}}, 10.0, ToleranceConfig{}, ev);
  ASSERT_EQ(tr.events.size(), 1u);
  EXPECT_NEAR(tr.events[0].t_event, 1.5 * std::numbers::pi, 1e-9);
}

TEST(Integrate, TerminalEventEndsRun) {
  std::vector<EventSpec<2>> ev{{"stop", [](const State& s) { return s.q[0]; }, Direction::Any, true}};
  const auto tr = integrate<2>(Oscillator{}, State{0.0, {1.0, 0.0}}, 10.0, ToleranceConfig{}, ev);
  EXPECT_EQ(tr.termination, Termination::TerminalEvent);
  ASSERT_EQ(tr.events.size(), 1u);
  EXPECT_NEAR(tr.back().t, 0.5 * std::numbers::pi, 1e-9);
  EXPECT_EQ(tr.back(), tr.events[0].state);
}

TEST(Integrate, StepBudget) {
  ToleranceConfig tol;
  tol.max_steps = 5;
  const auto tr = integrate<2>(Oscillator{}, State{0.0, {1.0, 0.0}}, 100.0, tol);
  EXPECT_EQ(tr.termination, Termination::StepBudget);
  EXPECT_LE(tr.accepted_steps + tr.rejected_steps, 5u);
}

TEST(Integrate, StepFloor) {
  ToleranceConfig tol;
  tol.min_step = 0.5;
  tol.max_step = 1.0;
  const auto tr = integrate<2>(Explodes{}, State{0.0, {0.0, 0.0}}, 10.0, tol);
  EXPECT_EQ(tr.termination, Termination::StepFloor);
}

TEST(Integrate, FrozenSlowVariable) {
  // eps = 0 is not a valid model parameter, so use the raw field.
  auto fast = [](double, const Vec2& q) -> Vec2 {
    return {(1.0 - q[0] * q[0]) * (q[0] - q[1]), 0.0};
  };
  const auto tr = integrate<2>(fast, State{0.0, {0.5, 2.0}}, 20.0, ToleranceConfig{});
  for (std::size_t i = 1; i < tr.samples.size(); ++i) {
    // Strictly decreasing until the step error dominates the distance to -1.
    if (tr.samples[i - 1].q[0] > -1.0 + 1e-6) {
      ASSERT_LT(tr.samples[i].q[0], tr.samples[i - 1].q[0]);
    } else {
      ASSERT_NEAR(tr.samples[i].q[0], -1.0, 1e-6);
    }
    ASSERT_EQ(tr.samples[i].q[1], 2.0);
  }
  EXPECT_NEAR(tr.back().q[0], -1.0, 1e-6);
}

TEST(Integrate, TranscriticalMatchesClosedForm) {
  const auto m = make_transcritical_dynamical(0.05);
  ToleranceConfig tol;
  tol.rel_tol = 1e-11;
  tol.abs_tol = 1e-300;
  const auto tr = integrate<2>(m, State{0.0, {0.1, 1.0}}, 40.0, tol);
  for (const auto& s : tr.samples) {
    const double x = bernoulli_solution(0.1, 1.0, 0.05, s.t).x;
    ASSERT_NEAR(s.q[0] / x, 1.0, 1e-6) << "t=" << s.t;
  }
}

TEST(Integrate, FirstStripCrossingResidual) {
  const auto m = make_enhanced_delay(0.05, Chart::UY);
  const auto ev = m.events({"x_zero"});
  const auto tr = integrate<2>(m, State{0.0, {0.5, 1.0}}, 100.0, ToleranceConfig{}, ev);
  ASSERT_FALSE(tr.events.empty());
  const auto& e = tr.events.front();
  EXPECT_LE(std::abs(e.state.q[0]), 1e-9);
  EXPECT_LE(e.residual, 1e-9);
}

TEST(Integrate, Deterministic) {
  const auto m = make_enhanced_delay(0.02, Chart::UY);
  const auto a = integrate<2>(m, State{0.0, {0.2, 0.5}}, 500.0, ToleranceConfig{}, m.standard_events);
  const auto b = integrate<2>(m, State{0.0, {0.2, 0.5}}, 500.0, ToleranceConfig{}, m.standard_events);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) ASSERT_EQ(a.samples[i], b.samples[i]);
  ASSERT_EQ(a.events.size(), b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    ASSERT_EQ(a.events[i].t_event, b.events[i].t_event);
    ASSERT_EQ(a.events[i].state, b.events[i].state);
  }
}

TEST(Integrate, TighterToleranceNeverWorse) {
  const auto m = make_enhanced_delay(0.05, Chart::UY);
  const State s0{0.0, {0.3, 0.1}};
  auto final_at = [&](double rtol) {
    ToleranceConfig t;
    t.rel_tol = rtol;
    t.abs_tol = rtol * 1e-3;
    return integrate<2>(m, s0, 50.0, t).back().q;
  };
  const Vec2 ref = final_at(1e-13);
  double prev = std::numeric_limits<double>::infinity();
  for (double rtol = 1e-5; rtol >= 1e-11 * 0.99; rtol /= 2.0) {
    const Vec2 q = final_at(rtol);
    const double err = std::max(std::abs(q[0] - ref[0]), std::abs(q[1] - ref[1]));
    // Allow a factor of 2: PI control is not strictly monotone in the tolerance.
    EXPECT_LE(err, 2.0 * prev + 1e-14) << "rtol=" << rtol;
    prev = std::min(prev, err);
  }
}

TEST(Integrate, Chunked) {
  const auto m = make_enhanced_delay(0.05, Chart::UY);
  int calls = 0;
  const auto tr = integrate_until<2>(m, State{0.0, {0.3, 0.1}}, 10.0, 35.0, ToleranceConfig{},
                                     {}, IntegrateOptions{Chart::UY},
                                     [&](const Trajectory&) { return ++calls == 2; });
  EXPECT_EQ(calls, 2);
  EXPECT_DOUBLE_EQ(tr.back().t, 20.0);
  for (std::size_t i = 1; i < tr.samples.size(); ++i) ASSERT_LT(tr.samples[i - 1].t, tr.samples[i].t);
}

TEST(LocateEvent, LinearMotion) {
  ToleranceConfig tol;
  const std::pair<State, State> br{State{0.0, {0.0, 0.0}}, State{1.0, {1.0, 0.0}}};
  const auto rec = locate_event<2>(UnitDrift{}, br, [](const State& s) { return s.q[0] - 0.5; }, tol);
  EXPECT_NEAR(rec.t_event, 0.5, 1e-12);
}

TEST(LocateEvent, NoBracket) {
  const std::pair<State, State> br{State{0.0, {1.0, 0.0}}, State{1.0, {2.0, 0.0}}};
  try {
    (void)locate_event<2>(UnitDrift{}, br, [](const State& s) { return s.q[0]; }, ToleranceConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoBracket);
  }
}

TEST(LocateEvent, DiagonalCrossingResidual) {
  const auto m = make_enhanced_delay(0.02, Chart::UY);
  const auto ev = m.events({"diagonal"});
  const auto tr = integrate<2>(m, State{0.0, {0.2, 0.5}}, 400.0, ToleranceConfig{}, ev);
  ASSERT_FALSE(tr.events.empty());
  for (const auto& e : tr.events) EXPECT_LE(e.residual, 1e-10);
}

TEST(Dense, HermiteReproducesCubic) {
  // q = t^3 has derivative 3t^2; cubic Hermite is exact.
  const StateN<1> a{0.0, {0.0}}, b{2.0, {8.0}};
  const auto m = hermite<1>(a, {0.0}, b, {12.0}, 1.5);
  EXPECT_NEAR(m.q[0], 3.375, 1e-14);
}

TEST(Dense, SampleAt) {
  const auto tr = integrate<2>(Oscillator{}, State{0.0, {1.0, 0.0}}, 5.0, ToleranceConfig{});
  const auto s = sample_at(tr, 2.345);
  EXPECT_NEAR(s.q[0], std::cos(2.345), 1e-6);
  EXPECT_THROW((void)sample_at(tr, 6.0), Error);
}
