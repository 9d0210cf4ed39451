#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "celsim/analytic.hpp"
#include "celsim/metrics.hpp"

using namespace celsim;

namespace {

MomentState state(double u, double v, double w) {
  MomentState s;
  s.u = u;
  s.v = v;
  s.w = w;
  return s;
}

// Smallest symplectic eigenvalue of the partially transposed covariance
// matrix: eigenvalues of |i J V~| computed numerically.
double symplectic_reference(const MomentState& s) {
  const double m = 2 * s.u + 1, n = 2 * s.v + 1, c = 2 * s.w;
  Eigen::Matrix4d v;
  v << m, 0, c, 0,
       0, m, 0, -c,
       c, 0, n, 0,
       0, -c, 0, n;
  Eigen::Matrix4d transpose_b = Eigen::Matrix4d::Identity();
  transpose_b(3, 3) = -1.0;
  const Eigen::Matrix4d vt = transpose_b * v * transpose_b;
  Eigen::Matrix4d j = Eigen::Matrix4d::Zero();
  j(0, 1) = 1; j(1, 0) = -1; j(2, 3) = 1; j(3, 2) = -1;
  const Eigen::Vector4cd ev = (j * vt).eigenvalues();
  double smallest = INFINITY;
  for (int i = 0; i < 4; ++i) smallest = std::min(smallest, std::abs(ev[i]));
  return smallest;
}

}  // namespace

TEST(QuadratureVariance, VacuumAndSeeds) {
  EXPECT_EQ(quadrature_variance(state(0, 0, 0), Sign::minus), 1.0);
  for (Sign sign : {Sign::plus, Sign::minus})
    EXPECT_EQ(quadrature_variance(state(1.5, 3.0, 0.0), sign), 5.5);
  EXPECT_NEAR(quadrature_variance(steady_state_moments({10, .5, .2, 0, 0}), Sign::minus),
              steady_state_variance({10, .5, .2, 0, 0}, Sign::minus), 1e-12);
}

TEST(MeanPhotonNumber, Values) {
  EXPECT_EQ(mean_photon_number(state(0, 0, 0)), 0.0);
  EXPECT_EQ(mean_photon_number(state(2, 1, 0)), 3.0);
  EXPECT_NEAR(mean_photon_number(steady_state_moments({1, .5, 0, 0, 0})), 2.0, 1e-14);
}

TEST(CovarianceRecord, Vacuum) {
  const auto r = covariance_record(state(0, 0, 0));
  EXPECT_EQ(r.m, 1.0);
  EXPECT_EQ(r.n, 1.0);
  EXPECT_EQ(r.c, 0.0);
  EXPECT_EQ(r.sigma, 2.0);
  EXPECT_EQ(r.det_omega, 1.0);
  EXPECT_NEAR(r.v_s, 1.0, 1e-15);
  EXPECT_EQ(r.e_n, 0.0);
  EXPECT_FALSE(is_entangled(r));
}

TEST(CovarianceRecord, SmallGainSteadyState) {
  const auto r = covariance_record(state(1.5, 0.5, 1.0));
  EXPECT_EQ(r.m, 4.0);
  EXPECT_EQ(r.n, 2.0);
  EXPECT_EQ(r.c, 2.0);
  EXPECT_EQ(r.sigma, 28.0);
  EXPECT_EQ(r.det_omega, 16.0);
  EXPECT_NEAR(r.v_s, std::sqrt((28.0 - std::sqrt(720.0)) / 2.0), 1e-14);
  EXPECT_NEAR(r.v_s, 0.7639, 1e-4);
  EXPECT_NEAR(r.e_n, 0.3885, 1e-4);
  EXPECT_TRUE(is_entangled(r));
}

TEST(CovarianceRecord, LargeGainSteadyState) {
  const auto r = covariance_record(state(60, 50, 55));
  EXPECT_EQ(r.m, 121.0);
  EXPECT_EQ(r.n, 101.0);
  EXPECT_EQ(r.c, 110.0);
  EXPECT_EQ(r.sigma, 49042.0);
  EXPECT_EQ(r.det_omega, 14641.0);
  EXPECT_NEAR(r.v_s, 0.5464, 1e-4);
  EXPECT_NEAR(r.e_n, -std::log2(r.v_s), 1e-15);
  EXPECT_TRUE(is_entangled(r));
}

TEST(CovarianceRecord, MatchesNumericSymplecticSpectrum) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> A(0.1, 20.0), e(-0.02, 1.0), t(0.0, 8.0),
      n(0.0, 3.0);
  for (int i = 0; i < 300; ++i) {
    const ModelParams p{A(rng), 0.5, e(rng), n(rng), n(rng)};
    const auto s = moments(p, t(rng));
    const auto r = covariance_record(s);
    EXPECT_NEAR(r.v_s, symplectic_reference(s), 1e-8 * (1.0 + r.m + r.n));
    EXPECT_GE(r.e_n, 0.0);
  }
}

TEST(CovarianceRecord, GuardsNonPhysicalInput) {
  // A Gaussian covariance needs sigma^2 >= 4 det(Omega); break it by hand.
  CovarianceRecord r;
  r.det_a = 1.0;
  r.det_b = 1.0;
  r.det_c = 0.0;
  r.det_omega = 2.0;
  EXPECT_THROW(finish_record(r), NonPhysicalCovarianceError);

  // Round-off sized violations are clipped.
  CovarianceRecord edge;
  edge.det_a = 1.0;
  edge.det_b = 1.0;
  edge.det_c = 0.0;
  edge.det_omega = 1.0 + 1e-13;
  EXPECT_NO_THROW(finish_record(edge));
  EXPECT_NEAR(edge.v_s, 1.0, 1e-6);
}

TEST(CovarianceRecord, StableForStrongCorrelations) {
  // Nearly pure two-mode squeezed state with large photon numbers.
  const double r = 4.0;
  const double nbar = std::sinh(r) * std::sinh(r);
  const auto rec = covariance_record(state(nbar, nbar, std::sinh(r) * std::cosh(r)));
  EXPECT_NEAR(rec.v_s, std::exp(-2.0 * r), 1e-9);
}
