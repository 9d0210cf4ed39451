#pragma once

// Physical parameters of the seeded two-photon correlated-emission laser,
// their validation, and the constants of the linear moment dynamics.
//
// Units: every rate (A, kappa, drift and diffusion constants) is an inverse
// time in the same arbitrary unit; time is its reciprocal.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace celsim {

struct ModelParams {
  double A = 10.0;      ///< linear gain coefficient, > 0
  double kappa = 0.5;   ///< cavity damping constant, > 0
  double eta = 0.2;     ///< population inversion rho_cc - rho_aa, in [-1, 1]
  double nbar_a = 0.0;  ///< thermal seed photons in mode a at t = 0
  double nbar_b = 0.0;  ///< thermal seed photons in mode b at t = 0

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Sign of the slower decay exponent kappa + A*eta. The transients exist for
/// any sign; only the t -> infinity limit needs it positive.
inline bool is_stable(const ModelParams& p) noexcept {
  return p.kappa + p.A * p.eta > 0.0;
}

struct ValidationReport {
  std::vector<std::string> errors;
  bool unstable = false;

  bool ok() const noexcept { return errors.empty(); }
};

inline ValidationReport validate(const ModelParams& p) {
  ValidationReport report;
  auto require = [&](bool cond, const char* msg) {
    if (!cond) report.errors.emplace_back(msg);
  };
  // NaN fails every comparison below, so each check is written positively.
  require(std::isfinite(p.A) && p.A > 0.0, "A must be positive");
  require(std::isfinite(p.kappa) && p.kappa > 0.0, "kappa must be positive");
  require(std::isfinite(p.eta) && p.eta >= -1.0 && p.eta <= 1.0,
          "eta must lie in [-1, 1]");
  require(std::isfinite(p.nbar_a) && p.nbar_a >= 0.0,
          "nbar_a must be non-negative");
  require(std::isfinite(p.nbar_b) && p.nbar_b >= 0.0,
          "nbar_b must be non-negative");
  report.unstable = !is_stable(p);
  return report;
}

/// Looser check used by the numerical oracles, which also accept kappa = 0
/// (pure gain, no cavity loss) and A = 0 (no atoms).
inline void require_oracle_params(const ModelParams& p) {
  const bool ok = std::isfinite(p.A) && p.A >= 0.0 &&
                  std::isfinite(p.kappa) && p.kappa >= 0.0 &&
                  std::isfinite(p.eta) && std::abs(p.eta) <= 1.0 &&
                  std::isfinite(p.nbar_a) && p.nbar_a >= 0.0 &&
                  std::isfinite(p.nbar_b) && p.nbar_b >= 0.0;
  if (!ok) throw std::invalid_argument("celsim: invalid model parameters");
}

/// Constants of the moment dynamics
///   d<alpha>/dt  = -drift_aa <alpha> - cross <beta*>  + f_a
///   d<beta*>/dt  = -drift_bb <beta*> + cross <alpha>  + f_b*
/// with <f_a f_a*> = diff_aa delta and <f_b f_a> = diff_ab delta.
struct DriftDiffusion {
  double drift_aa = 0.0;
  double drift_bb = 0.0;
  double cross = 0.0;
  double diff_aa = 0.0;
  double diff_ab = 0.0;
};

inline DriftDiffusion drift_diffusion(const ModelParams& p) noexcept {
  // Clamp guards 1 - eta^2 against a -0.0 or tiny negative at |eta| = 1.
  const double coherence = std::sqrt(std::max(0.0, 1.0 - p.eta * p.eta));
  DriftDiffusion d;
  d.drift_aa = 0.5 * p.kappa - 0.25 * p.A * (1.0 - p.eta);
  d.drift_bb = 0.5 * p.kappa + 0.25 * p.A * (1.0 + p.eta);
  d.cross = 0.25 * p.A * coherence;
  d.diff_aa = 0.5 * p.A * (1.0 - p.eta);
  d.diff_ab = d.cross;
  return d;
}

/// Bose-Einstein occupancy 1/(e^x - 1) of a mode with x = omega / (k_B T).
inline double thermal_occupancy(double x) {
  if (!(x > 0.0)) throw std::domain_error("thermal_occupancy: x must be > 0");
  return 1.0 / std::expm1(x);
}

}  // namespace celsim
