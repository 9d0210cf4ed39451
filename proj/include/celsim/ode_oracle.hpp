#pragma once

// Deterministic moment equations of the master equation, integrated with
// classical fixed-step RK4. This path never divides by eta, so it checks the
// closed forms (and their eta -> 0 branch) independently.
//
// With the drift/diffusion constants (a, b, c, D_aa, D_ab):
//
//   du/dt = -2a u - 2c w + D_aa
//   dv/dt = -2b v + 2c w
//   dw/dt = -(a + b) w + c (u - v) + D_ab
//
// The homogeneous part is P' = M P + P M^T for P = <x x^dagger>,
// x = (alpha, beta*), M = [[-a, -c], [c, -b]]; the constants come from the
// normal-ordered noise correlators.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "celsim/model.hpp"
#include "celsim/trajectory.hpp"

namespace celsim {

struct MomentVector {
  double u = 0.0;
  double v = 0.0;
  double w = 0.0;

  friend MomentVector operator+(MomentVector x, const MomentVector& y) noexcept {
    return {x.u + y.u, x.v + y.v, x.w + y.w};
  }
  friend MomentVector operator*(double s, const MomentVector& x) noexcept {
    return {s * x.u, s * x.v, s * x.w};
  }
  bool finite() const noexcept {
    return std::isfinite(u) && std::isfinite(v) && std::isfinite(w);
  }
};

/// One classical RK4 step of y' = f(y) for any vector-space State.
template <class State, class Rhs>
State rk4_step(const State& y, double h, Rhs&& f) {
  const State k1 = f(y);
  const State k2 = f(y + (0.5 * h) * k1);
  const State k3 = f(y + (0.5 * h) * k2);
  const State k4 = f(y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

class MomentOde {
 public:
  explicit MomentOde(const DriftDiffusion& d) noexcept : d_(d) {}
  explicit MomentOde(const ModelParams& p) noexcept : d_(drift_diffusion(p)) {}

  MomentVector operator()(const MomentVector& y) const noexcept {
    return {
        -2.0 * d_.drift_aa * y.u - 2.0 * d_.cross * y.w + d_.diff_aa,
        -2.0 * d_.drift_bb * y.v + 2.0 * d_.cross * y.w,
        -(d_.drift_aa + d_.drift_bb) * y.w + d_.cross * (y.u - y.v) + d_.diff_ab,
    };
  }

  const DriftDiffusion& constants() const noexcept { return d_; }

 private:
  DriftDiffusion d_;
};

class IntegrationError : public std::runtime_error {
 public:
  explicit IntegrationError(double t)
      : std::runtime_error("moment integration produced a non-finite state at t=" +
                           std::to_string(t)),
        time_(t) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Integrates from (u, v, w) = initial on a uniform grid of spacing <= h up
/// to t_max, recording every `sample_every`-th step (the last step is always
/// recorded).
inline MomentTrajectory integrate(const DriftDiffusion& constants,
                                  MomentVector initial, double t_max, double h,
                                  std::size_t sample_every = 1) {
  if (!(t_max > 0.0) || !(h > 0.0) || h > t_max || sample_every == 0)
    throw std::invalid_argument("integrate: need t_max > 0 and 0 < h <= t_max");
  const MomentOde rhs(constants);
  const auto steps = static_cast<std::size_t>(std::ceil(t_max / h - 1e-9));
  const double step = t_max / static_cast<double>(steps);

  MomentTrajectory traj;
  traj.source = Provenance::ode;
  traj.points.reserve(steps / sample_every + 2);
  auto record = [&](std::size_t k, const MomentVector& y) {
    MomentState s;
    s.time = TimePoint::at(static_cast<double>(k) * t_max /
                           static_cast<double>(steps));
    s.u = y.u;
    s.v = y.v;
    s.w = y.w;
    traj.points.push_back(s);
  };

  MomentVector y = initial;
  record(0, y);
  for (std::size_t k = 1; k <= steps; ++k) {
    y = rk4_step(y, step, rhs);
    if (!y.finite())
      throw IntegrationError(static_cast<double>(k) * step);
    if (k % sample_every == 0 || k == steps) record(k, y);
  }
  return traj;
}

/// Starts from the thermal seed: u(0) = nbar_a, v(0) = nbar_b, w(0) = 0.
inline MomentTrajectory integrate(const ModelParams& p, double t_max, double h,
                                  std::size_t sample_every = 1) {
  require_oracle_params(p);
  return integrate(drift_diffusion(p), {p.nbar_a, p.nbar_b, 0.0}, t_max, h,
                   sample_every);
}

/// Right-hand side at the seeded initial condition.
inline MomentVector initial_slope_check(const ModelParams& p) {
  require_oracle_params(p);
  return MomentOde(p)({p.nbar_a, p.nbar_b, 0.0});
}

}  // namespace celsim
