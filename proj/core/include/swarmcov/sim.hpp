#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "swarmcov/domain.hpp"
#include "swarmcov/metric.hpp"

namespace swarmcov {

/// Stand-in stochastic controller: independent Metropolis random walks whose
/// stationary distribution is the target density.
struct ControllerParams {
  double step_scale = 3.0;  // proposal standard deviation, length units
  std::size_t n_steps = 4000;
  std::size_t stride = 20;  // record every `stride` steps; frame 0 is the start
  std::uint64_t seed = 1;
  /// Initial configuration; when empty every robot starts at `cluster_at`,
  /// or 5% in from the lower-left corner if that is empty too.
  std::optional<SwarmConfig> start;
  std::optional<Point> cluster_at;

  void validate() const;
};

/// Robot r draws from generator stream r of `seed`. Proposals leaving the
/// domain are rejected; others are accepted with min(1, rho(new) / rho(old)).
/// Times are step indices.
TrajectorySeries run_trajectory(const TargetDensity& rho,
                                const RectDomain& dom,
                                std::size_t n_robots,
                                const ControllerParams& params);

struct ErrorSeries {
  std::vector<double> t;
  std::vector<double> e;
};

/// Instantaneous error metric of every recorded frame.
ErrorSeries error_time_series(const TrajectorySeries& traj,
                              const TargetDensity& rho,
                              const ScaledKernel& k,
                              const QuadratureGrid& grid,
                              int threads = 1);

}  // namespace swarmcov
