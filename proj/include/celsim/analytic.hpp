#pragma once

// Closed-form second moments of the seeded two-mode cavity field.
//
// The cavity starts in a two-mode thermal state with means nbar_a, nbar_b and
// no intermodal correlation. All first moments and the moments <alpha^2>,
// <beta^2>, <alpha* beta> vanish for every t, so the state is fixed by
//
//   u = <alpha* alpha>,  v = <beta* beta>,  w = <alpha beta>  (real).
//
// Several closed forms carry 1/eta or 1/eta^2 prefactors whose singularity is
// removable. For |eta| < kEtaLimitTolerance they are replaced by their Taylor
// expansion to second order in eta.

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "celsim/model.hpp"

namespace celsim {

inline constexpr double kEtaLimitTolerance = 1e-4;

enum class Sign { plus, minus };

inline constexpr double sign_value(Sign s) noexcept {
  return s == Sign::plus ? 1.0 : -1.0;
}

/// A finite time or the t -> infinity marker.
class TimePoint {
 public:
  static constexpr TimePoint at(double t) noexcept { return TimePoint(t); }
  static constexpr TimePoint steady() noexcept {
    return TimePoint(std::numeric_limits<double>::infinity());
  }

  constexpr bool is_steady() const noexcept {
    return t_ == std::numeric_limits<double>::infinity();
  }
  /// The finite time; +infinity for the steady marker.
  constexpr double value() const noexcept { return t_; }

  friend constexpr bool operator==(TimePoint, TimePoint) = default;

 private:
  constexpr explicit TimePoint(double t) noexcept : t_(t) {}
  double t_;
};

struct MomentState {
  TimePoint time = TimePoint::at(0.0);
  double u = 0.0;
  double v = 0.0;
  double w = 0.0;
};

/// Transfer coefficients of the field amplitudes:
///   alpha(t) = a_plus  alpha(0) + b_plus  beta*(0) + noise
///   beta(t)  = a_minus beta(0)  + b_minus alpha*(0) + noise
struct CoefficientSet {
  double a_plus = 1.0;
  double a_minus = 1.0;
  double b_plus = 0.0;
  double b_minus = 0.0;
};

/// Noise-integral correlators <C+* C+>, <D+* D+> and <C+* D+> (= <D+* C+>).
/// They satisfy u_noise = cc + dd + 2 cd.
struct NoiseCorrelators {
  double cc = 0.0;
  double dd = 0.0;
  double cd = 0.0;
};

class NoSteadyStateError : public std::domain_error {
 public:
  NoSteadyStateError()
      : std::domain_error("no steady state: kappa + A*eta <= 0") {}
};

namespace detail {

inline double coherence(double eta) noexcept {
  return std::sqrt(std::max(0.0, 1.0 - eta * eta));
}

/// (1 - e^{-rate t}) / rate, continuous through rate = 0.
inline double decay_integral(double rate, double t) noexcept {
  const double x = rate * t;
  if (std::abs(x) < 1e-300) return t;
  return -std::expm1(-x) / rate;
}

/// Regularized lower incomplete gamma function P(k, x) for integer k >= 1:
///   P(k, x) = 1 - e^{-x} sum_{l<k} x^l / l!  =  e^{-x} sum_{l>=k} x^l / l!
inline double incomplete_gamma_p(int k, double x) noexcept {
  if (x <= 0.0) return 0.0;
  if (x < k + 1.0) {
    double term = 1.0;
    for (int l = 1; l <= k; ++l) term *= x / l;
    double sum = 0.0;
    for (int l = k + 1; term > 1e-18 * sum || sum == 0.0; ++l) {
      sum += term;
      term *= x / l;
      if (l > k + 200) break;
    }
    return std::exp(-x) * sum;
  }
  double term = 1.0;
  double sum = 0.0;
  for (int l = 0; l < k; ++l) {
    sum += term;
    term *= x / (l + 1);
  }
  return 1.0 - std::exp(-x) * sum;
}

/// sum_i eta^i sum_k table[i][k] r^k P(k, tau) for a second-order eta series.
/// table[i][k] is the coefficient of r^k; k runs 0..5 (k = 0 is unused).
using SeriesTable = std::array<std::array<double, 6>, 3>;

inline double eval_series(const SeriesTable& table, double eta, double r,
                          double tau) noexcept {
  std::array<double, 6> rk_pk{};
  double rk = 1.0;
  for (int k = 1; k < 6; ++k) {
    rk *= r;
    rk_pk[k] = rk * incomplete_gamma_p(k, tau);
  }
  double result = 0.0;
  double eta_i = 1.0;
  for (const auto& row : table) {
    double coeff = 0.0;
    for (int k = 1; k < 6; ++k) coeff += row[k] * rk_pk[k];
    result += eta_i * coeff;
    eta_i *= eta;
  }
  return result;
}

// Second-order eta expansions of the seed-free moments, in units kappa = 1
// (r = A/kappa, tau = kappa t). The w series omits its sqrt(1-eta^2) factor
// and the cd series its (1-eta^2) factor.
inline constexpr SeriesTable kNoiseU = {{
    {0, 1.0 / 2, 1.0 / 8, 0, 0, 0},
    {0, -1.0 / 2, -1.0 / 2, -3.0 / 16, 0, 0},
    {0, 0, 3.0 / 8, 1.0 / 2, 7.0 / 32, 0},
}};
inline constexpr SeriesTable kNoiseV = {{
    {0, 0, 1.0 / 8, 0, 0, 0},
    {0, 0, 0, -3.0 / 16, 0, 0},
    {0, 0, -1.0 / 8, 0, 7.0 / 32, 0},
}};
inline constexpr SeriesTable kNoiseW = {{
    {0, 1.0 / 4, 1.0 / 8, 0, 0, 0},
    {0, 0, -1.0 / 4, -3.0 / 16, 0, 0},
    {0, 0, 0, 1.0 / 4, 7.0 / 32, 0},
}};
inline constexpr SeriesTable kNoiseCC = {{
    {0, 1.0 / 2, 1.0 / 4, 1.0 / 16, 0, 0},
    {0, -1.0 / 2, -1.0 / 2, -5.0 / 16, -3.0 / 32, 0},
    {0, 0, 1.0 / 4, 7.0 / 16, 11.0 / 32, 7.0 / 64},
}};
inline constexpr SeriesTable kNoiseCD = {{
    {0, 0, -1.0 / 16, -1.0 / 32, 0, 0},
    {0, 0, 0, 1.0 / 16, 3.0 / 64, 0},
    {0, 0, 0, 0, -1.0 / 16, -7.0 / 128},
}};

inline bool use_limit_branch(double eta) noexcept {
  return std::abs(eta) < kEtaLimitTolerance;
}

/// The three exponentials e^{-(kappa+A eta)t}, e^{-kappa t} and
/// e^{-(2kappa+A eta)t/2} together with their decay integrals.
struct Exponentials {
  double slow_rate, fast_rate, mixed_rate;  // kappa+A eta, kappa, kappa+A eta/2
  double e1, e2, e12;
  double i1, i2, i12;  // (1 - e)/rate for each
};

inline Exponentials exponentials(const ModelParams& p, double t) noexcept {
  Exponentials x{};
  x.slow_rate = p.kappa + p.A * p.eta;
  x.fast_rate = p.kappa;
  x.mixed_rate = p.kappa + 0.5 * p.A * p.eta;
  x.e1 = std::exp(-x.slow_rate * t);
  x.e2 = std::exp(-x.fast_rate * t);
  x.e12 = std::exp(-x.mixed_rate * t);
  x.i1 = decay_integral(x.slow_rate, t);
  x.i2 = decay_integral(x.fast_rate, t);
  x.i12 = decay_integral(x.mixed_rate, t);
  return x;
}

}  // namespace detail

inline CoefficientSet coefficients(const ModelParams& p, double t) {
  const double eta = p.eta;
  const double s = detail::coherence(eta);
  CoefficientSet c;
  if (!detail::use_limit_branch(eta)) {
    const double es = std::exp(-0.5 * (p.kappa + p.A * eta) * t);
    const double ef = std::exp(-0.5 * p.kappa * t);
    c.a_plus = ((eta - 1.0) * es + (eta + 1.0) * ef) / (2.0 * eta);
    c.a_minus = ((eta + 1.0) * es + (eta - 1.0) * ef) / (2.0 * eta);
    c.b_plus = s / (2.0 * eta) * (es - ef);
    c.b_minus = -c.b_plus;
    return c;
  }
  // With x = A eta t / 2 the slow exponential is ef e^{-x}. Both
  // (1 + e^{-x})/2 and (1 - e^{-x})/eta are evaluated without cancellation;
  // the latter tends to A t / 2 as eta -> 0.
  const double ef = std::exp(-0.5 * p.kappa * t);
  const double x = 0.5 * p.A * eta * t;
  const double mean = 1.0 + 0.5 * std::expm1(-x);
  const double slope = eta == 0.0 ? 0.5 * p.A * t : -std::expm1(-x) / eta;
  c.a_plus = ef * (mean + 0.5 * slope);
  c.a_minus = ef * (mean - 0.5 * slope);
  c.b_plus = -0.5 * s * ef * slope;
  c.b_minus = -c.b_plus;
  return c;
}

inline NoiseCorrelators noise_correlators(const ModelParams& p, double t) {
  const double eta = p.eta;
  NoiseCorrelators n;
  if (detail::use_limit_branch(eta)) {
    const double r = p.A / p.kappa;
    const double tau = p.kappa * t;
    n.cc = detail::eval_series(detail::kNoiseCC, eta, r, tau);
    n.cd = (1.0 - eta * eta) * detail::eval_series(detail::kNoiseCD, eta, r, tau);
    return n;
  }
  const auto x = detail::exponentials(p, t);
  const double e2 = eta * eta;
  // Decay integrals of e^{-rate t} with rate kappa+A eta, kappa and
  // (2 kappa + A eta)/2; the last equals 2 (1 - e12)/(2 kappa + A eta).
  n.cc = p.A * (1.0 - eta) / e2 *
         ((eta - 1.0) * (eta - 1.0) * x.i1 / 8.0 +
          (e2 - 1.0) * x.i12 / 4.0 +
          (eta + 1.0) * (eta + 1.0) * x.i2 / 8.0);
  n.cd = p.A * (1.0 - e2) / e2 *
         ((eta - 1.0) * x.i1 / 16.0 - (eta + 1.0) * x.i2 / 16.0 +
          x.i12 / 8.0);
  return n;
}

inline MomentState moments(const ModelParams& p, double t) {
  const double eta = p.eta;
  const double s = detail::coherence(eta);
  const double na = p.nbar_a;
  const double nb = p.nbar_b;
  MomentState m;
  m.time = TimePoint::at(t);

  if (detail::use_limit_branch(eta)) {
    const double r = p.A / p.kappa;
    const double tau = p.kappa * t;
    const auto c = coefficients(p, t);
    m.u = detail::eval_series(detail::kNoiseU, eta, r, tau) +
          na * c.a_plus * c.a_plus + nb * c.b_plus * c.b_plus;
    m.v = detail::eval_series(detail::kNoiseV, eta, r, tau) +
          nb * c.a_minus * c.a_minus + na * c.b_minus * c.b_minus;
    m.w = s * detail::eval_series(detail::kNoiseW, eta, r, tau) +
          na * c.a_plus * c.b_minus + nb * c.b_plus * c.a_minus;
    return m;
  }

  const auto x = detail::exponentials(p, t);
  const double A = p.A;
  const double e2 = eta * eta;
  const double ep = eta + 1.0;
  const double em = eta - 1.0;
  // i12 is (1 - e12)/((2 kappa + A eta)/2), hence the halving below.
  const double gain_slow = x.i1 / (4.0 * eta);
  const double gain_mixed = x.i12 / (4.0 * eta);
  const double beat = x.e1 + x.e2 - 2.0 * x.e12;

  m.u = -A * em * em * gain_slow + A * (1.0 - e2) * gain_mixed +
        na / (4.0 * e2) * (em * em * x.e1 + ep * ep * x.e2 + 2.0 * (e2 - 1.0) * x.e12) +
        nb * (1.0 - e2) / (4.0 * e2) * beat;
  m.v = -A * (1.0 - e2) * gain_slow + A * (1.0 - e2) * gain_mixed +
        nb / (4.0 * e2) * (ep * ep * x.e1 + em * em * x.e2 + 2.0 * (e2 - 1.0) * x.e12) +
        na * (1.0 - e2) / (4.0 * e2) * beat;
  m.w = -A * (1.0 - eta) * s * gain_slow + A * s * gain_mixed -
        na * s / (4.0 * e2) * (em * x.e1 - ep * x.e2 + 2.0 * x.e12) +
        nb * s / (4.0 * e2) * (ep * x.e1 - em * x.e2 - 2.0 * x.e12);
  return m;
}

/// Seed-independent t -> infinity limit of `moments`.
inline MomentState steady_state_moments(const ModelParams& p) {
  if (!is_stable(p)) throw NoSteadyStateError();
  const double A = p.A;
  const double k = p.kappa;
  const double eta = p.eta;
  const double s = detail::coherence(eta);
  const double denom = 4.0 * (k + A * eta) * (2.0 * k + A * eta);
  MomentState m;
  m.time = TimePoint::steady();
  m.u = A * (1.0 - eta) * (A + 4.0 * k + 3.0 * A * eta) / denom;
  m.v = A * A * (1.0 - eta * eta) / denom;
  m.w = A * s * (A + 2.0 * k + A * eta) / denom;
  return m;
}

/// Steady-state quadrature variance, evaluated from its own closed form
/// rather than from the steady moments.
inline double steady_state_variance(const ModelParams& p, Sign sign) {
  if (!is_stable(p)) throw NoSteadyStateError();
  const double A = p.A;
  const double k = p.kappa;
  const double eta = p.eta;
  const double s = detail::coherence(eta);
  const double sg = sign_value(sign);
  const double denom = 4.0 * k * (2.0 * k + A * eta) * (k + A * eta);
  const double base = 4.0 * k * (k + A * eta);
  const double direct =
      A * (1.0 - eta) * (base + A * (A + 2.0 * k + A * eta) * (1.0 + sg * s)) /
      denom;
  const double correlated =
      A * s * (base + A * A * (eta * eta - 1.0 - sg * s)) / denom;
  return 1.0 + direct + sg * correlated;
}

}  // namespace celsim
