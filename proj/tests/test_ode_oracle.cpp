#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "celsim/analytic.hpp"
#include "celsim/ode_oracle.hpp"

using namespace celsim;

TEST(MomentOde, InitialSlopes) {
  const auto s = initial_slope_check({1.0, 0.5, 0.0, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(s.u, 0.5);
  EXPECT_DOUBLE_EQ(s.v, 0.0);
  EXPECT_DOUBLE_EQ(s.w, 0.25);

  const auto full = initial_slope_check({7.0, 0.5, 1.0, 0.0, 0.0});
  EXPECT_EQ(full.u, 0.0);
  EXPECT_EQ(full.v, 0.0);
  EXPECT_EQ(full.w, 0.0);

  EXPECT_DOUBLE_EQ(initial_slope_check({1.0, 0.5, 0.0, 0.0, 2.0}).v, -2.0);
}

TEST(MomentOde, SteadyStateIsFixedPoint) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> A(0.1, 20.0), k(0.05, 2.0), e(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const ModelParams p{A(rng), k(rng), e(rng), 0, 0};
    if (!is_stable(p)) continue;
    const auto s = steady_state_moments(p);
    const MomentOde rhs(p);
    const auto d = rhs({s.u, s.v, s.w});
    const double scale = 1.0 + p.A * (1.0 + s.u + s.v);
    EXPECT_NEAR(d.u, 0.0, 1e-12 * scale);
    EXPECT_NEAR(d.v, 0.0, 1e-12 * scale);
    EXPECT_NEAR(d.w, 0.0, 1e-12 * scale);
  }
}

TEST(Integrate, InitialConditionRecorded) {
  const auto traj = integrate({10.0, 0.5, 0.2, 2.0, 0.5}, 1.0, 0.1);
  ASSERT_GE(traj.size(), 2u);
  EXPECT_EQ(traj.source, Provenance::ode);
  EXPECT_EQ(traj.points.front().time.value(), 0.0);
  EXPECT_EQ(traj.points.front().u, 2.0);
  EXPECT_EQ(traj.points.front().v, 0.5);
  EXPECT_EQ(traj.points.front().w, 0.0);
  EXPECT_EQ(traj.back().time.value(), 1.0);
}

TEST(Integrate, ReachesSteadyState) {
  const auto small = integrate({1.0, 0.5, 0.0, 0.0, 0.0}, 50.0, 1e-3, 1000).back();
  EXPECT_NEAR(small.u, 1.5, 1e-8);
  EXPECT_NEAR(small.v, 0.5, 1e-8);
  EXPECT_NEAR(small.w, 1.0, 1e-8);

  const auto large = integrate({10.0, 0.5, 0.2, 0.0, 0.0}, 40.0, 1e-3, 1000).back();
  EXPECT_NEAR(large.u, 4.8, 1e-6);
  EXPECT_NEAR(large.v, 3.2, 1e-6);
  EXPECT_NEAR(large.w, 4.24579, 1e-5);
}

TEST(Integrate, SamplingKeepsEndpoint) {
  const auto traj = integrate({1.0, 0.5, 0.0, 0.0, 0.0}, 1.05, 0.1, 4);
  // 11 steps of 1.05/11; samples at 0, 4, 8 and the final step.
  ASSERT_EQ(traj.size(), 4u);
  EXPECT_DOUBLE_EQ(traj.back().time.value(), 1.05);
}

TEST(Integrate, RejectsBadArguments) {
  const ModelParams p;
  EXPECT_THROW(integrate(p, 0.0, 0.1), std::invalid_argument);
  EXPECT_THROW(integrate(p, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(integrate(p, 1.0, 2.0), std::invalid_argument);
  ModelParams bad;
  bad.A = -1.0;
  EXPECT_THROW(integrate(bad, 1.0, 0.1), std::invalid_argument);
}

TEST(Integrate, BlowupReportsTime) {
  // Strongly unstable dynamics overflow doubles in finite simulated time.
  const ModelParams p{1000.0, 0.0, -1.0, 0.0, 0.0};
  try {
    integrate(p, 10.0, 1e-3);
    FAIL() << "expected IntegrationError";
  } catch (const IntegrationError& e) {
    EXPECT_GT(e.time(), 0.0);
    EXPECT_LT(e.time(), 10.0);
  }
}

TEST(Integrate, FourthOrderConvergence) {
  const ModelParams p{10.0, 0.5, 0.2, 0.5, 0.5};
  const auto exact = moments(p, 2.0);
  auto error = [&](double h) {
    const auto s = integrate(p, 2.0, h).back();
    return std::max({std::abs(s.u - exact.u), std::abs(s.v - exact.v), std::abs(s.w - exact.w)});
  };
  const double ratio = error(0.02) / error(0.01);
  EXPECT_GE(ratio, 12.0);
  EXPECT_LE(ratio, 20.0);
}

TEST(Integrate, GainOnlyWithoutLoss) {
  const auto traj = integrate({1.0, 0.0, 0.0, 0.0, 0.0}, 2.0, 1e-3, 100);
  for (std::size_t i = 1; i < traj.size(); ++i)
    EXPECT_GT(traj.points[i].u, traj.points[i - 1].u);
}

TEST(Integrate, PhysicalCovarianceAlongTrajectories) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> A(0.1, 10.0), e(-0.04, 1.0), n(0.0, 3.0);
  for (int i = 0; i < 20; ++i) {
    const ModelParams p{A(rng), 0.5, e(rng), n(rng), n(rng)};
    for (const auto& s : integrate(p, 5.0, 1e-2, 10).points) {
      EXPECT_GE(s.u, -1e-12);
      EXPECT_GE(s.v, -1e-12);
      // Cauchy-Schwarz for the number-like moments of (alpha, beta*).
      EXPECT_LE(s.w * s.w, s.u * (s.v + 1.0) + 1e-9 * (1.0 + s.u * s.v));
    }
  }
}
