#pragma once

// Observables of a two-mode moment state: quadrature variances of the
// superposed mode c = (a + b)/sqrt(2), the mean photon number, and the
// entanglement of the Gaussian state through its partially transposed
// covariance matrix.
//
// Conventions: vacuum quadrature variance is 1; the covariance matrix in the
// (X1, X2, X3, X4) ordering is
//
//   | m  0  c  0 |
//   | 0  m  0 -c |      m = 2u + 1,  n = 2v + 1,  c = 2w.
//   | c  0  n  0 |
//   | 0 -c  0  n |

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "celsim/analytic.hpp"

namespace celsim {

inline constexpr double kCovarianceGuardTolerance = 1e-9;

inline double quadrature_variance(const MomentState& s, Sign sign) noexcept {
  return 1.0 + s.u + s.v + sign_value(sign) * 2.0 * s.w;
}

/// 2N = u + v, the mean photon number of the two-mode field.
inline double mean_photon_number(const MomentState& s) noexcept {
  return s.u + s.v;
}

struct CovarianceRecord {
  double m = 1.0;
  double n = 1.0;
  double c = 0.0;
  double det_a = 1.0;
  double det_b = 1.0;
  double det_c = 0.0;
  double det_omega = 1.0;
  double sigma = 2.0;
  double v_s = 1.0;   ///< smallest partially transposed symplectic eigenvalue
  double e_n = 0.0;   ///< logarithmic negativity
};

class NonPhysicalCovarianceError : public std::domain_error {
 public:
  NonPhysicalCovarianceError()
      : std::domain_error("non-physical covariance: sigma^2 < 4 det(Omega)") {}
};

/// Completes a record from its block determinants. Throws
/// NonPhysicalCovarianceError when sigma^2 - 4 det(Omega) is negative beyond
/// the relative guard tolerance.
inline void finish_record(CovarianceRecord& r) {
  r.sigma = r.det_a + r.det_b - 2.0 * r.det_c;
  double disc = r.sigma * r.sigma - 4.0 * r.det_omega;
  if (disc < 0.0) {
    if (-disc > kCovarianceGuardTolerance * r.sigma * r.sigma)
      throw NonPhysicalCovarianceError();
    disc = 0.0;
  }
  // (sigma - sqrt(disc))/2 rewritten to avoid cancellation for strongly
  // correlated states, where both terms are large and nearly equal.
  const double root = std::sqrt(disc);
  const double vs2 = r.sigma + root > 0.0 ? 2.0 * r.det_omega / (r.sigma + root)
                                          : 0.0;
  r.v_s = std::sqrt(vs2);
  r.e_n = r.v_s < 1.0 ? -std::log2(r.v_s) : 0.0;
}

inline CovarianceRecord covariance_record(const MomentState& s) {
  CovarianceRecord r;
  r.m = 2.0 * s.u + 1.0;
  r.n = 2.0 * s.v + 1.0;
  r.c = 2.0 * s.w;
  r.det_a = r.m * r.m;
  r.det_b = r.n * r.n;
  r.det_c = -r.c * r.c;
  const double reduced = r.m * r.n - r.c * r.c;
  r.det_omega = reduced * reduced;
  finish_record(r);
  return r;
}

inline bool is_entangled(const CovarianceRecord& r) noexcept {
  return r.v_s < 1.0;
}

}  // namespace celsim
