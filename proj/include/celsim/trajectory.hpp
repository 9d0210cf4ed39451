#pragma once

#include <cmath>
#include <cstddef>
#include <string_view>
#include <vector>

#include "celsim/analytic.hpp"

namespace celsim {

enum class Provenance { analytic, ode, fock };

inline constexpr std::string_view to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::analytic: return "analytic";
    case Provenance::ode: return "ode";
    case Provenance::fock: return "fock";
  }
  return "unknown";
}

struct MomentTrajectory {
  Provenance source = Provenance::analytic;
  std::vector<MomentState> points;

  std::size_t size() const noexcept { return points.size(); }
  const MomentState& back() const { return points.back(); }
};

/// Uniform grid t_k = k t_max / steps, k = 0..steps, with steps chosen so the
/// spacing does not exceed dt. Times come from one division each, so t_max is
/// hit exactly and no rounding accumulates along the grid.
inline std::vector<double> uniform_grid(double t_max, double dt) {
  const auto steps = static_cast<std::size_t>(std::ceil(t_max / dt - 1e-9));
  std::vector<double> grid(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k)
    grid[k] = steps == 0 ? 0.0
                         : static_cast<double>(k) * t_max /
                               static_cast<double>(steps);
  return grid;
}

inline MomentTrajectory analytic_trajectory(const ModelParams& p,
                                            const std::vector<double>& times) {
  MomentTrajectory traj;
  traj.source = Provenance::analytic;
  traj.points.reserve(times.size());
  for (double t : times) traj.points.push_back(moments(p, t));
  return traj;
}

}  // namespace celsim
