#include <cmath>

#include <gtest/gtest.h>

#include "slowfast/canard/scan.hpp"

using namespace slowfast;

TEST(Canard, ClassifyBands) {
  ClassThresholds th;
  th.a_ref = 4.0;
  EXPECT_EQ(classify(0.0, th), AttractorClass::Equilibrium);
  EXPECT_EQ(classify(0.5, th), AttractorClass::SmallCycle);
  EXPECT_EQ(classify(0.8, th), AttractorClass::CanardLike);
  EXPECT_EQ(classify(2.4, th), AttractorClass::Relaxation);
  EXPECT_EQ(to_string(AttractorClass::CanardLike), "canard_like");
}

TEST(Canard, StableEquilibriumRightOfFold) {
  const auto s = attractor_summary(0.05, 0.5);
  EXPECT_EQ(s.cls, AttractorClass::Equilibrium);
  EXPECT_LT(s.amplitude, 1e-4);
  EXPECT_FALSE(s.period_estimate.has_value());
}

TEST(Canard, RelaxationCycleBetweenFolds) {
  const auto s = attractor_summary(0.05, -1.0);
  EXPECT_EQ(s.cls, AttractorClass::Relaxation);
  EXPECT_EQ(s.amplitude, s.a_ref);
  // The cycle jumps between the outer branches, x from about -3 to 1.
  EXPECT_GT(s.amplitude, 3.5);
  EXPECT_LT(s.amplitude, 4.5);
  ASSERT_TRUE(s.period_estimate.has_value());
  EXPECT_GT(*s.period_estimate, 0.0);
}

TEST(Canard, SmallCycleJustPastHopf) {
  const auto s = attractor_summary(0.05, -0.001);
  EXPECT_EQ(s.cls, AttractorClass::SmallCycle);
  EXPECT_GT(s.amplitude, 1e-4);
}

TEST(Canard, BisectBracketsTransition) {
  const auto scan = canard_bisect(0.1, {-0.5, 0.05}, 0.4 * 4.05, 1e-10);
  EXPECT_LE(scan.width, 1e-10);
  EXPECT_TRUE(scan.low_is_large);
  EXPECT_GE(scan.amplitudes.at(scan.c_low), scan.threshold);
  EXPECT_LT(scan.amplitudes.at(scan.c_high), scan.threshold);
  EXPECT_LT(scan.midpoint(), 0.0);
}

TEST(Canard, CoarseToleranceStopsImmediately) {
  const auto scan = canard_bisect(0.1, {-0.5, 0.05}, 1.0, 1.0);
  EXPECT_EQ(scan.iterations, 0);
  EXPECT_EQ(scan.c_low, -0.5);
  EXPECT_EQ(scan.c_high, 0.05);
}

TEST(Canard, NoTransitionInRange) {
  try {
    (void)canard_bisect(0.1, {0.2, 0.5}, 1.0, 1e-6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoTransitionInRange);
  }
}

TEST(Canard, BisectIsReproducible) {
  const auto a = canard_bisect(0.1, {-0.5, 0.05}, 1.0, 1e-8);
  const auto b = canard_bisect(0.1, {-0.5, 0.05}, 1.0, 1e-8);
  EXPECT_EQ(a.c_low, b.c_low);
  EXPECT_EQ(a.c_high, b.c_high);
  EXPECT_EQ(a.amplitudes, b.amplitudes);
}

TEST(Canard, BadArguments) {
  EXPECT_THROW((void)canard_bisect(0.1, {0.05, -0.5}, 1.0, 1e-6), Error);
  EXPECT_THROW((void)canard_bisect(0.1, {-0.5, 0.05}, 0.0, 1e-6), Error);
  EXPECT_THROW((void)attractor_summary(0.0, -1.0), Error);
}

TEST(Canard, WindowScalingNeedsThreeEpsilons) {
  try {
    (void)window_scaling({0.1, 0.08});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InsufficientData);
  }
}

TEST(Canard, WindowShrinksWithEpsilon) {
  WindowOptions opt;
  opt.tol_c = 1e-12;
  const auto fit = window_scaling({0.12, 0.1, 0.08}, {0.2, 0.6}, opt);
  ASSERT_EQ(fit.points.size(), 3u);
  EXPECT_EQ(fit.used, 3u);
  EXPECT_GT(fit.points[0].width, fit.points[1].width);
  EXPECT_GT(fit.points[1].width, fit.points[2].width);
  EXPECT_LT(fit.slope, 0.0);
  EXPECT_GT(fit.r_squared, 0.95);
}
